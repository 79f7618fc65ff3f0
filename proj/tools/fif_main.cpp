// Command-line front end: ingest data files, solve for feasible parameters,
// assemble curves and surfaces, export samples and study reports.

#include "fif/convergence.hpp"
#include "fif/errors.hpp"
#include "fif/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace fif;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_infeasible = 3;
constexpr int exit_violation = 4;
constexpr int exit_numerical = 5;

constexpr double auto_margin = 0.1;
constexpr double check_slack = 1e-9;

struct Config {
    std::string mode;
    std::string input;
    std::string output;
    std::string report;
    std::vector<double> box;
    std::vector<double> line;
    std::vector<double> plane;
    std::string alpha = "auto";
    std::string lambda = "auto";
    std::size_t resolution = 256;
    double tol = 1e-10;
    unsigned seed = 0;
    std::size_t levels = 4;
    double rho = 0.5;
};

json config_json(const Config& c) {
    json j;
    j["mode"] = c.mode;
    j["input"] = c.input;
    j["output"] = c.output;
    if (!c.box.empty()) j["box"] = c.box;
    if (!c.line.empty()) j["line"] = c.line;
    if (!c.plane.empty()) j["plane"] = c.plane;
    j["alpha"] = c.alpha;
    j["lambda"] = c.lambda;
    j["resolution"] = c.resolution;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    return j;
}

void write_report(const Config& c, const json& report) {
    if (c.report.empty()) return;
    io::atomic_write(c.report, report.dump(2) + "\n");
}

json range_json(const constraints::FeasibleRange& fr) {
    json out = json::array();
    for (std::size_t n = 0; n < fr.sub.size(); ++n) {
        const auto& s = fr.sub[n];
        json e;
        e["subinterval"] = n;
        e["empty"] = s.empty;
        e["alpha_min"] = s.alpha_min;
        e["alpha_max"] = s.alpha_max;
        e["alpha_mid"] = s.alpha_mid;
        e["lambda_min"] = s.lambda_min;
        e["binding_lower"] = s.binding_lower;
        e["binding_upper"] = s.binding_upper;
        e["binding_lambda"] = s.binding_lambda;
        if (!s.note.empty()) e["note"] = s.note;
        out.push_back(e);
    }
    return out;
}

json sign_report_json(const std::vector<constraints::SubintervalSignReport>& reports) {
    json out = json::array();
    for (const auto& rep : reports) {
        json e;
        e["subinterval"] = rep.subinterval;
        e["all_hold"] = rep.all_hold;
        json conds = json::array();
        for (const auto& c : rep.conditions)
            conds.push_back({{"name", c.name}, {"value", c.value}, {"holds", c.holds}});
        e["conditions"] = conds;
        out.push_back(e);
    }
    return out;
}

bool sniff_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r\n");
        if (b == std::string::npos || line[b] == '#') continue;
        return line.find("x,") != std::string::npos || line.find("x ,") != std::string::npos;
    }
    throw parse_error("'" + path + "' is empty");
}

// ---- curve pipeline -------------------------------------------------------

struct CurveConstraint {
    std::optional<constraints::RectangleConstraint> box;
    std::optional<constraints::LineConstraint> line;
};

CurveConstraint curve_constraint(const Config& c) {
    CurveConstraint out;
    if (!c.box.empty()) out.box = constraints::RectangleConstraint{c.box[0], c.box[1]};
    if (!c.line.empty()) out.line = constraints::LineConstraint{c.line[0], c.line[1]};
    return out;
}

constraints::FeasibleRange curve_feasible(const rq::HermiteCurveData& data,
                                          const CurveConstraint& cc) {
    if (cc.box) return constraints::rectangle_feasible(data, *cc.box);
    if (cc.line) return constraints::above_line_feasible(data, *cc.line);
    // No constraint: the caps alone.
    constraints::FeasibleRange fr;
    fr.sub.resize(data.knots.subintervals());
    for (std::size_t n = 0; n < fr.sub.size(); ++n) {
        auto& s = fr.sub[n];
        s.alpha_min = -data.knots.ratio(n);
        s.alpha_max = data.knots.ratio(n);
        s.alpha_mid = 0.0;
        s.lambda_min = 0.0;
        s.empty = false;
        s.binding_lower = s.binding_upper = "cap a_n";
        s.binding_lambda = "none";
    }
    return fr;
}

constraints::LambdaBound curve_lambda_bound(const rq::HermiteCurveData& data,
                                            const CurveConstraint& cc, std::size_t n,
                                            double alpha) {
    if (cc.box) return constraints::rectangle_lambda_bound(data, *cc.box, n, alpha);
    if (cc.line) return constraints::above_line_lambda_bound(data, *cc.line, n, alpha);
    return {};
}

int run_curve(const Config& c, json& report) {
    const io::ParsedCurve parsed = io::parse_curve_file(c.input);
    const rq::HermiteCurveData& data = parsed.data;
    const std::size_t subs = data.knots.subintervals();
    report["derivatives_estimated"] = parsed.derivatives_estimated;

    const CurveConstraint cc = curve_constraint(c);
    const constraints::FeasibleRange fr = curve_feasible(data, cc);
    if (cc.box || cc.line) report["feasible"] = range_json(fr);

    // Scaling first (range midpoints, or the user's file), then tension at
    // the scaling actually chosen.
    std::vector<double> alpha, lambda;
    if (c.alpha == "auto") {
        if (!fr.all_feasible()) {
            report["error"] = "no feasible parameters under the sufficient conditions";
            return exit_infeasible;
        }
        alpha.resize(subs);
        for (std::size_t n = 0; n < subs; ++n) alpha[n] = fr.sub[n].alpha_mid;
    } else {
        alpha = io::parse_value_list_file(c.alpha, subs, "alpha");
    }
    if (c.lambda == "auto") {
        lambda.resize(subs);
        for (std::size_t n = 0; n < subs; ++n) {
            const constraints::LambdaBound bound = curve_lambda_bound(data, cc, n, alpha[n]);
            if (!bound.feasible) {
                report["error"] = "no tension parameter works at subinterval " +
                                  std::to_string(n) + ": " + bound.note;
                return exit_infeasible;
            }
            lambda[n] = bound.value > 0.0 ? bound.value * (1.0 + auto_margin) : 1.0;
        }
    } else {
        lambda = io::parse_value_list_file(c.lambda, subs, "lambda");
    }
    report["chosen"] = {{"alpha", alpha}, {"lambda", lambda}};

    if (cc.box) {
        const auto signs =
            coefficient_sign_validate(data, rq::ShapeParams::tension(lambda), alpha, *cc.box);
        report["sign_conditions"] = sign_report_json(signs);
    } else if (cc.line) {
        const auto signs =
            coefficient_sign_validate(data, rq::ShapeParams::tension(lambda), alpha, *cc.line);
        report["sign_conditions"] = sign_report_json(signs);
    }

    const rq::RationalQuarticFIF fif =
        rq::assemble_fif(data, rq::ShapeParams::tension(lambda), alpha);
    const core::FixedPointTable table = fif.sample(c.resolution, c.tol);
    report["contraction"] = table.contraction;
    report["iterations"] = table.iterate_distances.size();
    report["final_iterate_distance"] =
        table.iterate_distances.empty() ? 0.0 : table.iterate_distances.back();
    report["sample_error_bound"] = c.tol;

    int status = exit_ok;
    if (cc.box || cc.line) {
        std::string violation;
        for (const auto& [x, v] : table.merged()) {
            if (cc.box && (v < cc.box->lower - check_slack || v > cc.box->upper + check_slack))
                violation = "sample at x = " + io::format_double(x) + " leaves the box";
            if (cc.line && v <= cc.line->value(x) - check_slack)
                violation = "sample at x = " + io::format_double(x) + " falls below the line";
            if (!violation.empty()) break;
        }
        if (!violation.empty()) {
            report["constraint_check"] = {{"ok", false}, {"violation", violation}};
            status = exit_violation;
        } else {
            report["constraint_check"] = {{"ok", true}};
        }
    }

    if (!c.output.empty() && status == exit_ok)
        io::atomic_write(c.output, io::format_curve_samples(table.merged()));
    return status;
}

// ---- surface pipeline -----------------------------------------------------

int run_surface(const Config& c, json& report) {
    const io::ParsedSurface parsed = io::parse_surface_file(c.input);
    const surface::SurfaceGridData& data = parsed.data;
    const std::size_t m = data.m(), n = data.n();
    report["partials_estimated"] = parsed.partials_estimated;

    std::optional<constraints::RectangleConstraint> box;
    std::optional<surface::PlaneConstraint> plane;
    if (!c.box.empty()) box = constraints::RectangleConstraint{c.box[0], c.box[1]};
    if (!c.plane.empty()) plane = surface::PlaneConstraint{c.plane[0], c.plane[1], c.plane[2]};

    std::optional<surface::SurfaceFeasible> sf;
    if (box)
        sf = surface::surface_box_feasible(data, *box);
    else if (plane)
        sf = surface::surface_above_plane_feasible(data, *plane);
    if (sf) {
        json rows = json::array(), cols = json::array();
        for (const auto& fr : sf->rows) rows.push_back(range_json(fr));
        for (const auto& fr : sf->cols) cols.push_back(range_json(fr));
        report["feasible"] = {{"rows", rows}, {"cols", cols}};
    }

    // Scaling first (range midpoints or the user's matrices), then tension
    // at the scaling actually chosen, line by line.
    surface::XDirectionParams px{surface::Matrix(m - 1, n), surface::Matrix(m - 1, n, 1.0)};
    surface::YDirectionParams py{surface::Matrix(m, n - 1), surface::Matrix(m, n - 1, 1.0)};
    if (c.alpha == "auto") {
        if (sf && !sf->all_feasible()) {
            report["error"] = "no feasible parameters under the sufficient conditions";
            return exit_infeasible;
        }
        if (sf) {
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j < n; ++j) px.scaling(i, j) = sf->rows[j].sub[i].alpha_mid;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j)
                    py.scaling(i, j) = sf->cols[i].sub[j].alpha_mid;
        }
    } else {
        const auto mats = io::parse_surface_params_file(c.alpha, m, n, "alpha");
        px.scaling = mats.x;
        py.scaling = mats.y;
    }
    if (c.lambda == "auto") {
        if (box || plane) {
            const auto line_bound = [&](const rq::HermiteCurveData& section, bool is_row,
                                        std::size_t fixed, std::size_t sub, double a) {
                if (box) return constraints::rectangle_lambda_bound(section, *box, sub, a);
                const constraints::LineConstraint trace =
                    is_row ? constraints::LineConstraint{-plane->c / plane->a,
                                                         plane->c * (1.0 - data.y[fixed] / plane->b)}
                           : constraints::LineConstraint{-plane->c / plane->b,
                                                         plane->c * (1.0 - data.x[fixed] / plane->a)};
                return constraints::above_line_lambda_bound(section, trace, sub, a);
            };
            for (std::size_t j = 0; j < n; ++j) {
                const rq::HermiteCurveData section = data.row_section(j);
                for (std::size_t i = 0; i + 1 < m; ++i) {
                    const auto b = line_bound(section, true, j, i, px.scaling(i, j));
                    if (!b.feasible) {
                        report["error"] = "no tension parameter works on row " +
                                          std::to_string(j) + ": " + b.note;
                        return exit_infeasible;
                    }
                    px.shape(i, j) = b.value > 0.0 ? b.value * (1.0 + auto_margin) : 1.0;
                }
            }
            for (std::size_t i = 0; i < m; ++i) {
                const rq::HermiteCurveData section = data.col_section(i);
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    const auto b = line_bound(section, false, i, j, py.scaling(i, j));
                    if (!b.feasible) {
                        report["error"] = "no tension parameter works on column " +
                                          std::to_string(i) + ": " + b.note;
                        return exit_infeasible;
                    }
                    py.shape(i, j) = b.value > 0.0 ? b.value * (1.0 + auto_margin) : 1.0;
                }
            }
        }
    } else {
        const auto mats = io::parse_surface_params_file(c.lambda, m, n, "lambda");
        px.shape = mats.x;
        py.shape = mats.y;
    }

    const surface::BlendedSurface blend = surface::blend_surface(data, px, py, c.resolution, c.tol);
    const surface::SurfaceSamples samples = blend.sample_lattice();

    int status = exit_ok;
    if (box || plane) {
        std::string violation;
        for (std::size_t gx = 0; gx < samples.x.size() && violation.empty(); ++gx)
            for (std::size_t gy = 0; gy < samples.y.size(); ++gy) {
                const double v = samples.values(gx, gy);
                const bool bad =
                    (box && (v < box->lower - check_slack || v > box->upper + check_slack)) ||
                    (plane && v <= plane->value(samples.x[gx], samples.y[gy]) - check_slack);
                if (bad) {
                    violation = "sample at (" + io::format_double(samples.x[gx]) + ", " +
                                io::format_double(samples.y[gy]) + ") violates the constraint";
                    break;
                }
            }
        if (!violation.empty()) {
            report["constraint_check"] = {{"ok", false}, {"violation", violation}};
            status = exit_violation;
        } else {
            report["constraint_check"] = {{"ok", true}};
        }
    }

    if (!c.output.empty() && status == exit_ok)
        io::atomic_write(c.output, io::format_surface_samples(samples));
    return status;
}

// ---- feasible / validate --------------------------------------------------

int run_feasible(const Config& c, json& report) {
    if (sniff_curve_file(c.input)) {
        const io::ParsedCurve parsed = io::parse_curve_file(c.input);
        const CurveConstraint cc = curve_constraint(c);
        if (!cc.box && !cc.line)
            throw CLI::ValidationError("--mode feasible needs --box or --line for curve input");
        const constraints::FeasibleRange fr = curve_feasible(parsed.data, cc);
        report["feasible"] = range_json(fr);
        return fr.all_feasible() ? exit_ok : exit_infeasible;
    }
    const io::ParsedSurface parsed = io::parse_surface_file(c.input);
    surface::SurfaceFeasible sf;
    if (!c.box.empty())
        sf = surface::surface_box_feasible(parsed.data,
                                           constraints::RectangleConstraint{c.box[0], c.box[1]});
    else if (!c.plane.empty())
        sf = surface::surface_above_plane_feasible(
            parsed.data, surface::PlaneConstraint{c.plane[0], c.plane[1], c.plane[2]});
    else
        throw CLI::ValidationError("--mode feasible needs --box or --plane for surface input");
    json rows = json::array(), cols = json::array();
    for (const auto& fr : sf.rows) rows.push_back(range_json(fr));
    for (const auto& fr : sf.cols) cols.push_back(range_json(fr));
    report["feasible"] = {{"rows", rows}, {"cols", cols}};
    return sf.all_feasible() ? exit_ok : exit_infeasible;
}

int run_validate(const Config& c, json& report) {
    const io::ParsedCurve parsed = io::parse_curve_file(c.input);
    const rq::HermiteCurveData& data = parsed.data;
    const std::size_t subs = data.knots.subintervals();
    if (c.alpha == "auto" || c.lambda == "auto")
        throw CLI::ValidationError("--mode validate needs explicit --alpha and --lambda files");
    const auto alpha = io::parse_value_list_file(c.alpha, subs, "alpha");
    const auto lambda = io::parse_value_list_file(c.lambda, subs, "lambda");
    report["chosen"] = {{"alpha", alpha}, {"lambda", lambda}};

    std::vector<constraints::SubintervalSignReport> signs;
    if (!c.box.empty())
        signs = coefficient_sign_validate(data, rq::ShapeParams::tension(lambda), alpha,
                                          constraints::RectangleConstraint{c.box[0], c.box[1]});
    else if (!c.line.empty())
        signs = coefficient_sign_validate(data, rq::ShapeParams::tension(lambda), alpha,
                                          constraints::LineConstraint{c.line[0], c.line[1]});
    else
        throw CLI::ValidationError("--mode validate needs --box or --line");
    report["sign_conditions"] = sign_report_json(signs);

    for (const auto& rep : signs)
        if (!rep.all_hold) {
            report["violated"] = {{"subinterval", rep.subinterval},
                                  {"condition", rep.first_violated()->name}};
            return exit_violation;
        }
    return exit_ok;
}

// ---- convergence study ----------------------------------------------------

int run_converge(const Config& c, json& report) {
    const convergence::SmoothCurve sine{[](double x) { return std::sin(x); },
                                        [](double x) { return std::cos(x); }};
    const convergence::SmoothSurface sheet{
        [](double x, double y) { return std::sin(x) * std::cos(y); },
        [](double x, double y) { return std::cos(x) * std::cos(y); },
        [](double x, double y) { return -std::sin(x) * std::sin(y); }};

    std::string csv = "study,rho,level,knots,mesh,sup_error,order,classical_gap,bound\n";
    json studies = json::array();
    for (const double rho : {0.0, c.rho}) {
        const auto rows = convergence::curve_convergence_study(sine, 0.0, M_PI, 4, c.levels, rho,
                                                               1.0, c.resolution, c.tol);
        json jr = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            csv += "curve," + io::format_double(rho) + "," + std::to_string(i) + "," +
                   std::to_string(r.knots) + "," + io::format_double(r.mesh) + "," +
                   io::format_double(r.sup_error) + "," +
                   (std::isnan(r.order) ? "" : io::format_double(r.order)) + ",,\n";
            jr.push_back({{"knots", r.knots},
                          {"mesh", r.mesh},
                          {"sup_error", r.sup_error},
                          {"order", std::isnan(r.order) ? json() : json(r.order)}});
        }
        studies.push_back({{"study", "curve"},
                           {"rho", rho},
                           {"rows", jr},
                           {"estimated_order", convergence::extrapolated_order(rows)}});
        if (rho == c.rho && c.rho == 0.0) break; // avoid a duplicate zero study
    }

    const auto srows = convergence::surface_convergence_study(
        sheet, 0.0, M_PI, 0.0, M_PI, 2, std::max<std::size_t>(2, c.levels / 2), c.rho, 1.0,
        std::max<std::size_t>(8, c.resolution / 8), c.tol);
    json js = json::array();
    bool dominated = true;
    for (std::size_t i = 0; i < srows.size(); ++i) {
        const auto& r = srows[i];
        csv += "surface," + io::format_double(c.rho) + "," + std::to_string(i) + "," +
               std::to_string(r.grid) + "," + io::format_double(r.mesh) + "," +
               io::format_double(r.sup_error) + ",," + io::format_double(r.classical_gap) + "," +
               io::format_double(r.perturbation_bound) + "\n";
        js.push_back({{"grid", r.grid},
                      {"mesh", r.mesh},
                      {"sup_error", r.sup_error},
                      {"classical_gap", r.classical_gap},
                      {"perturbation_bound", r.perturbation_bound}});
        dominated = dominated && r.classical_gap <= r.perturbation_bound;
    }
    studies.push_back({{"study", "surface"}, {"rho", c.rho}, {"rows", js}});
    report["studies"] = studies;
    report["bound_dominates"] = dominated;

    if (!c.output.empty()) io::atomic_write(c.output, csv);
    return dominated ? exit_ok : exit_numerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-referential rational quartic interpolation toolkit"};
    Config cfg;
    app.add_option("--mode", cfg.mode, "curve | surface | feasible | validate | converge")
        ->required()
        ->check(CLI::IsMember({"curve", "surface", "feasible", "validate", "converge"}));
    app.add_option("--input", cfg.input, "data file (curve or surface format)");
    app.add_option("--output", cfg.output, "sample/table destination");
    app.add_option("--report", cfg.report, "structured report destination (JSON)");
    app.add_option("--box", cfg.box, "ordinate band: lower upper")->expected(2);
    app.add_option("--line", cfg.line, "line constraint: slope intercept")->expected(2);
    app.add_option("--plane", cfg.plane, "plane constraint: a b c")->expected(3);
    app.add_option("--alpha", cfg.alpha, "scaling factors: file path or 'auto'");
    app.add_option("--lambda", cfg.lambda, "tension parameters: file path or 'auto'");
    app.add_option("--resolution", cfg.resolution, "cells per subinterval")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
    app.add_option("--tol", cfg.tol, "fixed-point sup-norm tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "seed echoed into reports");
    app.add_option("--levels", cfg.levels, "convergence study refinements");
    app.add_option("--rho", cfg.rho, "scaling policy for the study")
        ->check(CLI::Range(0.0, 0.999));
    CLI11_PARSE(app, argc, argv);

    json report;
    report["config"] = config_json(cfg);
    int status = exit_ok;
    try {
        if (cfg.mode != "converge" && cfg.input.empty())
            throw CLI::ValidationError("--input is required for this mode");
        if ((cfg.mode == "curve" || cfg.mode == "validate") && !cfg.plane.empty())
            throw CLI::ValidationError("--plane applies to surface input only");
        if (cfg.mode == "surface" && !cfg.line.empty())
            throw CLI::ValidationError("--line applies to curve input only");
        if (cfg.mode == "curve")
            status = run_curve(cfg, report);
        else if (cfg.mode == "surface")
            status = run_surface(cfg, report);
        else if (cfg.mode == "feasible")
            status = run_feasible(cfg, report);
        else if (cfg.mode == "validate")
            status = run_validate(cfg, report);
        else
            status = run_converge(cfg, report);
    } catch (const parse_error& e) {
        report["error"] = e.what();
        status = exit_parse;
    } catch (const infeasible_error& e) {
        report["error"] = e.what();
        status = exit_infeasible;
    } catch (const constraint_violation_error& e) {
        report["error"] = e.what();
        status = exit_violation;
    } catch (const numerical_error& e) {
        report["error"] = e.what();
        report["last_iterate_distance"] = e.last_distance;
        status = exit_numerical;
    } catch (const CLI::Error& e) {
        report["error"] = e.what();
        status = exit_parse;
    } catch (const std::invalid_argument& e) {
        report["error"] = e.what();
        status = exit_parse;
    } catch (const std::domain_error& e) {
        report["error"] = e.what();
        status = exit_parse;
    } catch (const std::exception& e) {
        report["error"] = e.what();
        status = exit_numerical;
    }
    report["exit"] = status;
    try {
        write_report(cfg, report);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "report write failed: %s\n", e.what());
        return status == exit_ok ? exit_numerical : status;
    }
    if (status != exit_ok && report.contains("error"))
        std::fprintf(stderr, "%s\n", report["error"].get<std::string>().c_str());
    return status;
}
