#include "pulsecell/snapshot_io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace pulsecell {

namespace {

std::string fmt_real(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_snapshot(const Grid& grid, const Array2& field, const std::string& path,
                    SnapshotFormat format, const std::string& header) {
  std::ofstream out = open_out(path);
  if (format == SnapshotFormat::Csv) {
    out << "# " << header << "\n";
    out << "r,z,layer,T\n";
    for (Index j = 0; j < grid.nz(); ++j)
      for (Index i = 0; i < grid.row_extent(j); ++i)
        out << fmt_real(grid.r_center(i)) << ',' << fmt_real(grid.z_center(j)) << ','
            << grid.layer(i) << ',' << fmt_real(field(i, j)) << "\n";
  } else {
    const Index nr = grid.nr(), nz = grid.nz();
    out << "# vtk DataFile Version 3.0\n";
    out << header << "\n";
    out << "ASCII\nDATASET STRUCTURED_GRID\n";
    out << "DIMENSIONS " << nr << ' ' << nz << " 1\n";
    out << "POINTS " << nr * nz << " double\n";
    for (Index j = 0; j < nz; ++j)
      for (Index i = 0; i < nr; ++i)
        out << fmt_real(grid.r_center(i)) << ' ' << fmt_real(grid.z_center(j)) << " 0\n";
    out << "POINT_DATA " << nr * nz << "\n";
    out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    for (Index j = 0; j < nz; ++j)
      for (Index i = 0; i < nr; ++i)
        out << fmt_real(grid.in_mask(i, j) ? field(i, j) : nan) << "\n";
    out << "SCALARS layer int 1\nLOOKUP_TABLE default\n";
    for (Index j = 0; j < nz; ++j)
      for (Index i = 0; i < nr; ++i) out << grid.layer(i) << "\n";
    out << "SCALARS mask int 1\nLOOKUP_TABLE default\n";
    for (Index j = 0; j < nz; ++j)
      for (Index i = 0; i < nr; ++i) out << (grid.in_mask(i, j) ? 1 : 0) << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<SnapshotRow> read_snapshot_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);
  std::vector<SnapshotRow> rows;
  std::string line;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {
      if (line != "r,z,layer,T") throw Error(path + ": unexpected column header");
      saw_columns = true;
      continue;
    }
    SnapshotRow row;
    std::istringstream ss(line);
    char c1, c2, c3;
    if (!(ss >> row.r >> c1 >> row.z >> c2 >> row.layer >> c3 >> row.T) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw Error(path + ": malformed row: " + line);
    rows.push_back(row);
  }
  return rows;
}

void write_trace(const std::vector<TraceEntry>& trace, size_t probe_count,
                 const std::string& path, const std::string& header) {
  std::ofstream out = open_out(path);
  out << "# " << header << "\n";
  out << "t";
  for (size_t k = 1; k <= probe_count; ++k) out << ",probe_" << k;
  out << "\n";
  for (const auto& e : trace) {
    out << fmt_real(e.t);
    for (Real v : e.values) out << ',' << fmt_real(v);
    out << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

void write_phase_trace(const std::vector<Vector>& periods, Real t_per,
                       const std::string& path, const std::string& header) {
  std::ofstream out = open_out(path);
  out << "# " << header << "\n";
  out << "period,phase_index,phase_t,value\n";
  for (size_t p = 0; p < periods.size(); ++p) {
    const Index s = periods[p].size();
    for (Index q = 0; q < s; ++q) {
      const Real phase_t = (static_cast<Real>(p) + static_cast<Real>(q) / s) * t_per;
      out << p << ',' << q << ',' << fmt_real(phase_t) << ','
          << fmt_real(periods[p][q]) << "\n";
    }
  }
  if (!out) throw Error("write failed: " + path);
}

void write_bench_csv(const BenchReport& report, const std::string& path,
                     const std::string& header) {
  std::ofstream out = open_out(path);
  out << "# " << header << "\n";
  out << "# grid=" << report.nr << "x" << report.nz
      << " hardware_threads=" << report.hardware_threads << " date=" << report.timestamp
      << "\n";
  out << "workers,wall_s,speedup,efficiency\n";
  for (const auto& row : report.rows) {
    out << row.workers << ',' << fmt_real(row.wall_s) << ',' << fmt_real(row.speedup)
        << ',' << fmt_real(row.efficiency) << "\n";
    if (row.oversubscribed)
      out << "# workers=" << row.workers << " exceeds hardware threads\n";
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace pulsecell
