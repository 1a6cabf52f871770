#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tpflow/state.hpp"
#include "tpflow/stepper.hpp"

namespace tpflow {

inline constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a_hash(std::string_view data);

/// "# tpflow <version> config=<16-hex-digit hash>" — prepended to every
/// output so runs are attributable to their exact configuration.
std::string provenance_line(std::string_view config_text);

/// node_id,x,y,S,Pw,Po with 17 significant digits.
std::string fields_to_csv(const TimeState& state, const Geometry& geom,
                          const std::string& provenance);

/// Legacy ASCII VTK unstructured grid with point data S, Pw, Po
/// (17 significant digits; provenance in the title line).
std::string fields_to_vtk(const TimeState& state, const Geometry& geom,
                          const std::string& provenance);

/// step,t,min_S,max_S,mean_Pw,energy_acc,flux_imbalance,newton_iters
std::string runlog_to_csv(const RunLog& log, const std::string& provenance);

void write_file(const std::string& path, const std::string& contents);

}  // namespace tpflow
