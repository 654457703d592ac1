#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "neurotrig/sim.hpp"

namespace neurotrig {

/// Wide CSV, one row per kept sample. Columns: t, y0, y0_held, then per agent
/// i and level k: x_i_k, xh_i_k, af_i_k, afh_i_k (k >= 2), u_i, eps_i, e_i,
/// eh_i, yhat_i, z_i_k, zh_i_k, alpha_i_k, alphah_i_k, wnorm_i_k and, for
/// in-span runs, wtilde_i_k. Values use the shortest round-trip form.
void write_trajectory_csv(const TrajectoryRecord& record, std::ostream& os, std::size_t stride = 1);
std::vector<std::string> trajectory_columns(const TrajectoryRecord& record);

/// Inverse of write_trajectory_csv. The step is taken from the first two
/// rows; mode is kContinuous until channels are attached.
TrajectoryRecord read_trajectory_csv(std::istream& is);

/// signal_id,event_index,time,value
void write_events_csv(const std::vector<ChannelLog>& channels, std::ostream& os);
/// Thresholds are not part of the events file and read back as zero.
std::vector<ChannelLog> read_events_csv(std::istream& is);

/// Long format for plotting: t,series,value with one row per sample and
/// series (eps_i, x_i_k, u_i, yhat_i, y0).
void write_plot_csv(const TrajectoryRecord& record, std::ostream& os, std::size_t stride = 1);

/// Reads trajectory.csv and, if present, events.csv from a run directory.
TrajectoryRecord load_record(const std::filesystem::path& directory);

std::string format_double(double value);

}  // namespace neurotrig
