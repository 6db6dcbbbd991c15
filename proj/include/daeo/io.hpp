/**
 * @file io.hpp
 * @brief Trajectory output: CSV rows and the JSON sidecar.
 *
 * CSV columns are t, x0.., ystar0.., n_optimizers, is_event; floats are
 * written with 17 significant digits so a file parses back to the same
 * doubles.
 */
#ifndef DAEO_IO_HPP
#define DAEO_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "daeo/problem.hpp"
#include "daeo/solver.hpp"

namespace daeo {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> csv_header(const ProblemSpec &spec);
/// One CSV row per trajectory point, in the column order of csv_header.
CsvTable to_table(const ProblemSpec &spec, const Trajectory &traj);

void write_csv(std::ostream &os, const CsvTable &table);
/// @throws UsageError on malformed input.
CsvTable read_csv(std::istream &is);

/**
 * @brief Sidecar document: problem, config echo, counts, wall time and the
 * event table. With @c include_rows the trajectory rows are embedded too
 * (the --format json output).
 */
std::string sidecar_json(const ProblemSpec &spec, const SolverConfig &cfg,
                         const Trajectory &traj, bool include_rows = false);

} // namespace daeo

#endif
