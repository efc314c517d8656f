#pragma once

#include <filesystem>
#include <vector>

#include "driftplan/experiment.hpp"

namespace driftplan {

/// Run-log file layout:
///   # driftplan run log            comment
///   key=value                      resolved config header block
///   RECORDS
///   <typed record lines>           UPDATE / RMSE / DECISION / PROPOSAL /
///                                  DEPLOY / TRACK, chronological
///   SAMPLE_SUMMARY asv A drifter D total T
///   GRID mean                      final grids in the flow-field file
///   GRID variance                  format (scalar grids carry the value in
///   GRID rmse                      the u column, 0 in v)
///   END
void write_runlog(const RunLog& log, const std::filesystem::path& path);

/// Strict parse of the layout above; throws MalformedFile naming the line
/// number of the first offending line.
RunLog read_runlog(const std::filesystem::path& path);

/// Summary table: `field_id,cfg_id,seed,t,rmse`, one row per UPDATE record,
/// runs in batch order.
void write_summary(const std::vector<BatchRun>& runs, const std::filesystem::path& path);

}  // namespace driftplan
