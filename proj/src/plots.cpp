#include "vecctl/plots.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vecctl/params.hpp"

namespace vecctl {
namespace {

std::size_t column_of(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("trajectory has no '" + name + "' column");
  return static_cast<std::size_t>(it - header.begin()) + 1;  // gnuplot columns are 1-based
}

std::string quoted(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

std::vector<std::string> read_csv_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path + "' is empty");
  std::vector<std::string> header;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
  column_of(header, "I_H");
  return header;
}

std::string plot_script(const PlotRequest& req, const std::vector<std::string>& header) {
  const bool sit = std::find(header.begin(), header.end(), "M_S") != header.end();
  const std::string control = sit ? "M_S" : "p";
  const std::size_t c_col = column_of(header, control);
  const std::size_t i_col = column_of(header, "I_H");

  std::ostringstream out;
  out << "# gnuplot script; run with: gnuplot <this file>\n";
  out << "set datafile separator ','\n";
  out << "set terminal pngcairo size 900,700\n";
  out << "set output " << quoted(req.image) << '\n';
  out << "set multiplot layout 2,1 title " << quoted(req.title) << '\n';
  out << "set key top right\n";
  out << "set xlabel 'time (days)'\n";
  out << "set xrange [0:*]\n";
  if (sit) {
    out << "set ylabel 'sterile males'\n";
    out << "plot " << quoted(req.trajectory_csv) << " using 1:" << c_col
        << " skip 1 with lines lw 2 title 'M_S'\n";
  } else {
    out << "set ylabel 'Wolbachia proportion'\n";
    out << "set yrange [0:1]\n";
    out << "plot " << quoted(req.trajectory_csv) << " using 1:" << c_col
        << " skip 1 with lines lw 2 title 'p'\n";
    out << "set yrange [*:*]\n";
  }
  out << "set ylabel 'infected humans'\n";
  out << "plot " << quoted(req.trajectory_csv) << " using 1:" << i_col
      << " skip 1 with lines lw 2 title 'I_H'";
  if (!req.baseline_csv.empty()) {
    out << ", \\\n     " << quoted(req.baseline_csv) << " using 1:" << i_col
        << " skip 1 with lines dt 2 title 'I_H*'";
  }
  out << '\n';
  out << "unset multiplot\n";
  return out.str();
}

}  // namespace vecctl
