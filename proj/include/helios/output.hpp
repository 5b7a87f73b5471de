#pragma once

#include <map>
#include <string>

#include "helios/scenario.hpp"
#include "helios/sim_engine.hpp"

namespace helios {

// Shortest stable decimal ("%.12g") used for every CSV number.
std::string format_number(double v);

// Writes to <path>.tmp and renames over <path>.
void write_text_atomic(const std::string& path, const std::string& content);

// t_s,pv_w,load_w,net_w,net_controlled_w
void write_series_csv(const std::string& path, const RunResult& result);

// target_id,t_issue_s,t_arrival_s,depth,confidence
void write_forecasts_csv(const std::string& path, const RunResult& result);

// load_id,t_start_s,duration_s,power_delta_w
void write_actions_csv(const std::string& path, const RunResult& result);

// element_kind,element_id,sent_messages,relayed_volume
void write_traffic_csv(const std::string& path, const Scenario& scenario,
                       const RunResult& result);

// Per-plant energy and realized drop, ramp report, traffic totals; gains an
// "ab" section when an uncontrolled twin is supplied.
void write_summary_json(const std::string& path, const Scenario& scenario,
                        const RunResult& result, const RunResult* uncontrolled_twin = nullptr);

// Fraction of clear-sky production lost at each plant, maximized over the
// horizon: 1 - pv(I_actual)/pv(I_clear) tick by tick.
std::map<int, double> realized_drop(const Scenario& scenario, const RunResult& result);

}  // namespace helios
