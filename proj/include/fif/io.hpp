#pragma once

/**
 * \file io.hpp
 * File formats shared by the command-line front end and its tests: curve and
 * surface data readers, parameter-array readers, and deterministic
 * delimited-text writers.
 */

#include "fif/rq_spline.hpp"
#include "fif/surface.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fif::io {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Writes through a temporary file in the same directory and renames, so the
/// output appears atomically or not at all.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

struct ParsedCurve {
    rq::HermiteCurveData data;
    bool derivatives_estimated = false;
};

/**
 * Curve format: a header line "x,y,d" or "x,y", then one comma-separated row
 * per knot in strictly increasing x. Without the d column the slopes are
 * filled by the arithmetic-mean method. Blank lines and '#' comments are
 * skipped.
 */
ParsedCurve parse_curve(std::istream& in);
ParsedCurve parse_curve_file(const std::string& path);

struct ParsedSurface {
    surface::SurfaceGridData data;
    bool partials_estimated = false;
};

/**
 * Surface format: header "m n", a line of m x-knots, a line of n y-knots,
 * then m*n rows "i j z" or "i j z zx zy" with 1-based indices; partials are
 * estimated when absent. All rows must use the same arity and every cell must
 * appear exactly once.
 */
ParsedSurface parse_surface(std::istream& in);
ParsedSurface parse_surface_file(const std::string& path);

/// Whitespace/comma-separated numbers; the count must match `expected`.
std::vector<double> parse_value_list(std::istream& in, std::size_t expected, const char* what);
std::vector<double> parse_value_list_file(const std::string& path, std::size_t expected,
                                          const char* what);

/// Surface parameter file: an "[x]" section holding an (m-1) x n matrix in
/// row-major order, then a "[y]" section holding m x (n-1).
struct SurfaceParamMatrices {
    surface::Matrix x;
    surface::Matrix y;
};
SurfaceParamMatrices parse_surface_params(std::istream& in, std::size_t m, std::size_t n,
                                          const char* what);
SurfaceParamMatrices parse_surface_params_file(const std::string& path, std::size_t m,
                                               std::size_t n, const char* what);

/// "x,value" rows under a header.
std::string format_curve_samples(const std::vector<std::pair<double, double>>& samples);

/// "x,y,value" rows under a header, x-major.
std::string format_surface_samples(const surface::SurfaceSamples& samples);

} // namespace fif::io
