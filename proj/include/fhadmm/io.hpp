#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fhadmm/grid.hpp"
#include "fhadmm/oracle.hpp"
#include "fhadmm/stepper.hpp"

namespace fhadmm {

inline constexpr const char* field_magic = "FHADMM-FIELD 1";

/// Text header (magic, dim, n, length, encoding, end) followed by the raw
/// little-endian f64 values in flat index order. Round-trips bitwise.
void write_field(std::ostream& out, const ScalarField& f);
void write_field(const std::filesystem::path& path, const ScalarField& f);
/// Throws IoError on a corrupt header or a payload of the wrong size.
ScalarField read_field(std::istream& in);
ScalarField read_field(const std::filesystem::path& path);

/// Interchange export: one row per cell with indices, center coordinates and value.
void write_field_csv(std::ostream& out, const ScalarField& f);
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

inline constexpr const char* diagnostics_header =
    "step,time,iterations,energy,mass,mass_drift,one_minus_max,one_plus_min,criterion";
inline constexpr const char* convergence_header = "h_coarse,h_fine,delta_l2,rate";

void write_diagnostics_header(std::ostream& out);
void write_diagnostics_row(std::ostream& out, const StepReport& r);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
/// Fixed-width table of the same rows for reading in a terminal.
std::string render_convergence_table(const std::vector<ConvergenceRow>& rows);

}  // namespace fhadmm
