#pragma once

#include <string>
#include <vector>

namespace vecctl {

struct PlotRequest {
  std::string trajectory_csv;  // controlled run
  std::string baseline_csv;    // uncontrolled run, drawn as I_H*
  std::string image;           // png written by the script
  std::string title;
};

/// Gnuplot script with the control channel (M_S or p) on top and I_H against
/// the uncontrolled I_H* below. The model is detected from the trajectory
/// header. Output depends only on the request and the headers.
std::string plot_script(const PlotRequest& request, const std::vector<std::string>& header);

/// Reads the header line of a trajectory CSV; throws ValidationError when the
/// file is missing or has no I_H column.
std::vector<std::string> read_csv_header(const std::string& path);

}  // namespace vecctl
