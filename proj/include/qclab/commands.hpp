#pragma once

#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qclab/diagnostics.hpp"
#include "qclab/report.hpp"
#include "qclab/sampling.hpp"
#include "qclab/scene.hpp"

namespace qclab {

// Exit codes: 0 success, 1 configuration problem, 2 evaluation/internal
// failure, 3 usage error.  Content files and stdout must be byte-identical
// across reruns; timing goes to stderr only.

namespace cli {

struct CommonOpts {
    std::string scene_path;
    std::string out_dir;
    std::string format = "json";
    int depth = -1;
    int grid = -1;
    std::vector<double> radii;
};

inline int resolve_depth(const CommonOpts& o, const Scene& sc) { return o.depth >= 0 ? o.depth : sc.params.depth; }
inline int resolve_grid(const CommonOpts& o, const Scene& sc) { return o.grid >= 0 ? o.grid : sc.params.grid; }
inline std::vector<double> resolve_radii(const CommonOpts& o, const Scene& sc) {
    return o.radii.empty() ? sc.params.radii : o.radii;
}

inline void add_common(CLI::App* cmd, CommonOpts& o, bool with_depth = true, bool with_grid = true,
                       bool with_radii = false) {
    cmd->add_option("scene", o.scene_path, "scene description (JSON)")->required();
    cmd->add_option("--out", o.out_dir, "directory for report files");
    cmd->add_option("--format", o.format, "report format: csv, json or svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    if (with_depth) cmd->add_option("--depth", o.depth, "word-length cap")->check(CLI::Range(0, 24));
    if (with_grid) cmd->add_option("--grid", o.grid, "sampling resolution")->check(CLI::Range(1, 4096));
    if (with_radii)
        cmd->add_option("--radii", o.radii, "probe radius ladder")->delimiter(',')->check(CLI::PositiveNumber);
}

inline std::string ball_cells(const Ball& b) {
    std::string s;
    for (int i = 0; i < b.center().size(); ++i) s += format_double(b.center()[i]) + ",";
    s += format_double(b.radius());
    return s;
}

// ---- validate ------------------------------------------------------------------

inline int cmd_validate(const CommonOpts& o, std::ostream& out) {
    const Scene sc = load_scene(o.scene_path);
    const std::string hash = scene_hash(sc);
    Json summary = summary_skeleton(hash);
    out << "scene " << hash << " dimension " << sc.dimension << " balls " << sc.balls.size() << "\n";
    bool ok = true;

    if (!sc.balls.empty()) {
        const SchottkySet set = scene_schottky(sc);
        const ValidationReport rep = validate(set);
        summary["configuration"]["valid"] = rep.valid;
        summary["configuration"]["min_gap"] = rep.min_gap;
        Json issues = Json::array();
        for (const auto& is : rep.issues) issues.push_back(is.what);
        summary["configuration"]["issues"] = issues;
        if (rep.valid) {
            out << "configuration: VALID (min gap " << format_double(rep.min_gap) << ")\n";
        } else {
            out << "configuration: INVALID: " << rep.message() << "\n";
            ok = false;
        }
    } else {
        out << "configuration: no balls\n";
    }

    if (sc.correspondence.present) {
        try {
            const BoundaryCorrespondence corr = scene_correspondence(sc);
            const ValidationReport rep = validate(corr);
            summary["correspondence"]["valid"] = rep.valid;
            Json issues = Json::array();
            for (const auto& is : rep.issues) issues.push_back(is.what);
            summary["correspondence"]["issues"] = issues;
            if (rep.valid) {
                out << "correspondence: VALID\n";
            } else {
                out << "correspondence: INVALID: " << rep.message() << "\n";
                ok = false;
            }
        } catch (const ConfigError& e) {
            summary["correspondence"]["valid"] = false;
            summary["correspondence"]["issues"] = Json::array({e.what()});
            out << "correspondence: INVALID: " << e.what() << "\n";
            ok = false;
        }
    }

    if (!o.out_dir.empty()) {
        ensure_directory(o.out_dir);
        write_text_file(o.out_dir + "/summary.json", render_json(summary));
    }
    return ok ? 0 : 1;
}

// ---- orbit ---------------------------------------------------------------------

inline int cmd_orbit(const CommonOpts& o, std::ostream& out) {
    const Scene sc = load_scene(o.scene_path);
    const std::string hash = scene_hash(sc);
    const SchottkySet set = scene_schottky(sc);
    require_valid(set);
    const int depth = resolve_depth(o, sc);
    const OrbitPacking pack = orbit_packing(set, depth);

    out << "scene " << hash << " depth " << depth << "\n";
    for (int d = 0; d <= depth; ++d) {
        out << "depth " << d << ": " << pack.count_per_depth[static_cast<std::size_t>(d)] << " balls, max radius "
            << format_double(pack.max_radius_per_depth[static_cast<std::size_t>(d)]) << "\n";
    }
    out << "total " << pack.balls.size() << " balls\n";

    if (!o.out_dir.empty()) {
        ensure_directory(o.out_dir);
        Json summary = summary_skeleton(hash);
        summary["depth"] = depth;
        summary["total"] = pack.balls.size();
        summary["count_per_depth"] = pack.count_per_depth;
        summary["max_radius_per_depth"] = pack.max_radius_per_depth;
        write_text_file(o.out_dir + "/summary.json", render_json(summary));
        if (o.format == "csv") {
            std::vector<std::string> cols = {"depth", "word", "source"};
            for (int i = 0; i < set.n; ++i) cols.push_back("center_" + std::to_string(i));
            cols.push_back("radius");
            CsvTable csv(hash, cols);
            for (const OrbitBall& ob : pack.balls) {
                std::vector<std::string> cells = {std::to_string(ob.depth), ob.word.str(),
                                                  std::to_string(ob.source)};
                for (int i = 0; i < set.n; ++i) cells.push_back(format_double(ob.ball.center()[i]));
                cells.push_back(format_double(ob.ball.radius()));
                csv.row(cells);
            }
            write_text_file(o.out_dir + "/orbit.csv", csv.str());
        } else if (o.format == "svg") {
            if (set.n != 2) throw ConfigError("svg reports need dimension 2");
            SvgCanvas svg;
            for (const OrbitBall& ob : pack.balls)
                svg.add_circle(ob.ball.center()[0], ob.ball.center()[1], ob.ball.radius(), ob.depth,
                               ob.depth > 0);
            write_text_file(o.out_dir + "/orbit.svg", svg.str());
        }
    }
    return 0;
}

// ---- extend --------------------------------------------------------------------

// The complement seed map: identity for a self-correspondence; when every
// boundary map is a Moebius word the first one doubles as the candidate
// global map; identity otherwise.
inline LambdaMap lambda_for(const Scene& sc) {
    bool all_moebius = !sc.correspondence.maps.empty();
    for (const auto& m : sc.correspondence.maps)
        if (m.kind != Scene::MapSpec::Kind::Moebius) all_moebius = false;
    if (all_moebius) return LambdaMap::from_moebius(MoebiusMap{sc.correspondence.maps.front().mirrors});
    return LambdaMap::identity();
}

inline int cmd_extend(const CommonOpts& o, std::ostream& out) {
    const Scene sc = load_scene(o.scene_path);
    const std::string hash = scene_hash(sc);
    const BoundaryCorrespondence corr = scene_correspondence(sc);
    require_valid(corr);
    EquivariantMap em;
    em.corr = corr;
    em.lambda = lambda_for(sc);
    em.max_depth = resolve_depth(o, sc);
    const int grid = resolve_grid(o, sc);

    const int m = corr.source.count();
    std::vector<double> defects;
    for (int i = 0; i < m; ++i) {
        const Ball& b = corr.src_ball(i);
        std::vector<VecX> samples;
        for (const VecX& w : direction_grid(corr.source.n, grid))
            samples.push_back(b.center() + 1.05 * b.radius() * w);
        defects.push_back(check_equivariance(em, i, samples));
    }
    const EquivarianceReport rep = equivariance_residual(em, grid);
    const double worst = rep.max_defect;
    const char* verdict = worst <= 1e-6 ? "EQUIVARIANT" : (worst >= 0.1 ? "NONEQUIVARIANT" : "INCONCLUSIVE");

    out << "scene " << hash << " generators " << m << " grid " << grid << "\n";
    for (int i = 0; i < m; ++i)
        out << "generator " << i << " -> " << corr.partner(i) << ": defect "
            << format_double(defects[static_cast<std::size_t>(i)]) << "\n";
    out << "word defect " << format_double(rep.word_defect) << "\n";
    out << "boundary defect " << format_double(rep.boundary_defect) << "\n";
    out << "max defect " << format_double(worst) << "\n";
    out << "verdict " << verdict << "\n";

    if (!o.out_dir.empty()) {
        ensure_directory(o.out_dir);
        Json summary = summary_skeleton(hash);
        summary["grid"] = grid;
        summary["defects"] = defects;
        summary["word_defect"] = rep.word_defect;
        summary["boundary_defect"] = rep.boundary_defect;
        summary["max_defect"] = worst;
        summary["verdict"] = verdict;
        write_text_file(o.out_dir + "/summary.json", render_json(summary));
        if (o.format == "csv") {
            CsvTable csv(hash, {"generator", "partner", "defect"});
            for (int i = 0; i < m; ++i)
                csv.row({std::to_string(i), std::to_string(corr.partner(i)),
                         format_double(defects[static_cast<std::size_t>(i)])});
            write_text_file(o.out_dir + "/extend.csv", csv.str());
        } else if (o.format == "svg") {
            if (corr.source.n != 2) throw ConfigError("svg reports need dimension 2");
            SvgCanvas svg;
            for (const Ball& b : corr.source.removed) svg.add_circle(b.center()[0], b.center()[1], b.radius(), 0);
            for (const Ball& b : corr.target.removed) svg.add_circle(b.center()[0], b.center()[1], b.radius(), 1);
            write_text_file(o.out_dir + "/extend.svg", svg.str());
        }
    }
    return 0;
}

// ---- dilatation ------------------------------------------------------------------

inline std::vector<VecX> survey_grid(const SchottkySet& set, int per_axis) {
    if (set.n != 2 && set.n != 3) throw ConfigError("dilatation surveys need dimension 2 or 3");
    VecX lo = set.removed.front().center(), hi = lo;
    for (const Ball& b : set.removed) {
        for (int i = 0; i < set.n; ++i) {
            lo[i] = std::min(lo[i], b.center()[i] - b.radius());
            hi[i] = std::max(hi[i], b.center()[i] + b.radius());
        }
    }
    const VecX mid = 0.5 * (lo + hi);
    const VecX half = 0.75 * (hi - lo);  // inflate the hull by 1.5
    lo = mid - half;
    hi = mid + half;
    std::vector<VecX> pts;
    if (set.n == 2) {
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < per_axis; ++j) {
                VecX p(2);
                p[0] = lo[0] + (hi[0] - lo[0]) * (i + 0.5) / per_axis;
                p[1] = lo[1] + (hi[1] - lo[1]) * (j + 0.5) / per_axis;
                pts.push_back(p);
            }
    } else {
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < per_axis; ++j)
                for (int k = 0; k < per_axis; ++k) {
                    VecX p(3);
                    p[0] = lo[0] + (hi[0] - lo[0]) * (i + 0.5) / per_axis;
                    p[1] = lo[1] + (hi[1] - lo[1]) * (j + 0.5) / per_axis;
                    p[2] = lo[2] + (hi[2] - lo[2]) * (k + 0.5) / per_axis;
                    pts.push_back(p);
                }
    }
    return pts;
}

inline int cmd_dilatation(const CommonOpts& o, std::ostream& out) {
    const Scene sc = load_scene(o.scene_path);
    const std::string hash = scene_hash(sc);
    const BoundaryCorrespondence corr = scene_correspondence(sc);
    require_valid(corr);
    EquivariantMap em;
    em.corr = corr;
    em.lambda = lambda_for(sc);
    em.max_depth = resolve_depth(o, sc);
    const int grid = resolve_grid(o, sc);
    const std::vector<double> radii = resolve_radii(o, sc);
    const std::vector<VecX> pts = survey_grid(corr.source, grid);
    const SurveyReport rep = dilatation_survey(em, pts, radii, sc.params.directions);

    out << "scene " << hash << " grid " << grid << " points " << pts.size() << "\n";
    for (std::size_t ri = 0; ri < rep.summary.radii.size(); ++ri)
        out << "radius " << format_double(rep.summary.radii[ri]) << ": max H "
            << format_double(rep.summary.max_H[ri]) << ", median H " << format_double(rep.summary.median_H[ri])
            << "\n";
    out << "evaluated " << rep.summary.evaluated << " failed " << rep.summary.failed << "\n";

    if (!o.out_dir.empty()) {
        ensure_directory(o.out_dir);
        Json summary = summary_skeleton(hash);
        summary["grid"] = grid;
        summary["radii"] = rep.summary.radii;
        summary["max_H"] = rep.summary.max_H;
        summary["median_H"] = rep.summary.median_H;
        summary["evaluated"] = rep.summary.evaluated;
        summary["failed"] = rep.summary.failed;
        write_text_file(o.out_dir + "/summary.json", render_json(summary));
        if (o.format == "csv") {
            std::vector<std::string> cols;
            for (int i = 0; i < corr.source.n; ++i) cols.push_back("point_" + std::to_string(i));
            cols.push_back("word_length");
            cols.push_back("landed");
            for (double r : rep.summary.radii) cols.push_back("H_" + format_double(r));
            CsvTable csv(hash, cols);
            for (const SurveyRow& row : rep.rows) {
                std::vector<std::string> cells;
                for (int i = 0; i < corr.source.n; ++i) cells.push_back(format_double(row.point[i]));
                cells.push_back(std::to_string(row.word_length));
                cells.push_back(row.landed ? "1" : "0");
                for (std::size_t ri = 0; ri < rep.summary.radii.size(); ++ri)
                    cells.push_back(row.ok && ri < row.H.size() ? format_double(row.H[ri]) : "nan");
                csv.row(cells);
            }
            write_text_file(o.out_dir + "/dilatation.csv", csv.str());
        } else if (o.format == "svg") {
            if (corr.source.n != 2) throw ConfigError("svg reports need dimension 2");
            SvgCanvas svg;
            for (const Ball& b : corr.source.removed) svg.add_circle(b.center()[0], b.center()[1], b.radius(), 0);
            for (const SurveyRow& row : rep.rows) {
                if (!row.ok || row.H.empty() || !std::isfinite(row.H.back())) continue;
                const double h = row.H.back();
                const int color = h <= 1.01 ? 2 : (h > 1.5 ? 3 : 1);
                svg.add_circle(row.point[0], row.point[1], 0.004, color, true);
            }
            write_text_file(o.out_dir + "/dilatation.svg", svg.str());
        }
    }
    return 0;
}

// ---- denjoy circle ----------------------------------------------------------------

inline int cmd_denjoy_circle(const CommonOpts& o, std::ostream& out) {
    const Scene sc = load_scene(o.scene_path);
    const std::string hash = scene_hash(sc);
    const DenjoyCircle dc = scene_denjoy(sc);
    const int grid = std::max(resolve_grid(o, sc), 8) * 64;  // defect scan resolution
    const DefectReport defect = semiconjugacy_defect(dc, static_cast<std::size_t>(grid));

    out << "scene " << hash << " alpha " << format_double(dc.alpha) << " count " << dc.count << "\n";
    out << "free measure " << format_double(dc.c) << (dc.trivial ? " (no inserted intervals)" : "") << "\n";
    out << "defect max " << format_double(defect.max_defect) << " off-artifact "
        << format_double(defect.max_off_artifact) << " (grid " << defect.grid << ", excluded " << defect.excluded
        << ")\n";
    Json summary = summary_skeleton(hash);
    summary["alpha"] = dc.alpha;
    summary["count"] = dc.count;
    summary["free_measure"] = dc.c;
    summary["trivial"] = dc.trivial;
    summary["defect"]["max"] = defect.max_defect;
    summary["defect"]["off_artifact"] = defect.max_off_artifact;
    summary["defect"]["grid"] = defect.grid;
    summary["defect"]["excluded"] = defect.excluded;
    if (!dc.trivial) {
        const WanderingReport wander = wandering_check(dc, 2 * std::max(dc.count, 1));
        out << "wandering " << (wander.pass ? "PASS" : "FAIL") << " over " << wander.checked << " steps";
        if (!wander.pass) out << " (first return " << wander.first_return << ")";
        out << "\n";
        summary["wandering"]["pass"] = wander.pass;
        summary["wandering"]["checked"] = wander.checked;
        summary["wandering"]["first_return"] = wander.first_return;
        if (dc.count >= 1)
            out << "slope on interval 0: " << format_double(dc.slope(0)) << "\n";
        Json arts = Json::array();
        for (const auto& ar : dc.artifacts) {
            Json a;
            a["start"] = ar.first;
            a["width"] = ar.second;
            arts.push_back(a);
        }
        summary["artifacts"] = arts;
    }

    if (!o.out_dir.empty()) {
        ensure_directory(o.out_dir);
        write_text_file(o.out_dir + "/summary.json", render_json(summary));
        if (o.format == "csv" && !dc.trivial) {
            CsvTable csv(hash, {"k", "orbit_point", "left", "right", "length", "image_left", "image_right"});
            for (int k = -dc.count; k <= dc.count; ++k) {
                const double a = dc.interval_a(k), b = dc.interval_b(k);
                csv.row({std::to_string(k), format_double(wrap_unit(k * dc.alpha)), format_double(a),
                         format_double(b), format_double(dc.length_of(k)), format_double(dc.f(a)),
                         format_double(dc.f(b))});
            }
            write_text_file(o.out_dir + "/denjoy_circle.csv", csv.str());
        } else if (o.format == "svg") {
            SvgCanvas svg;
            svg.set_stroke(0.003);
            // unit frame
            svg.add_segment(0, 0, 1, 0, 7);
            svg.add_segment(1, 0, 1, 1, 7);
            svg.add_segment(1, 1, 0, 1, 7);
            svg.add_segment(0, 1, 0, 0, 7);
            // graph of the circle map, split at wrap-arounds
            const int samples = 1024;
            std::vector<std::pair<double, double>> run;
            double prev = -1.0;
            for (int i = 0; i <= samples; ++i) {
                const double z = static_cast<double>(i) / samples;
                const double v = dc.f(z);
                if (!run.empty() && std::abs(v - prev) > 0.5) {
                    svg.add_polyline(run, 0);
                    run.clear();
                }
                run.emplace_back(z, v);
                prev = v;
            }
            svg.add_polyline(run, 0);
            if (!dc.trivial) {
                for (const auto& ar : dc.artifacts) {
                    const double end = ar.first + ar.second;
                    if (end <= 1.0) {
                        svg.add_segment(ar.first, -0.03, end, -0.03, 3);
                    } else {
                        svg.add_segment(ar.first, -0.03, 1.0, -0.03, 3);
                        svg.add_segment(0.0, -0.03, end - 1.0, -0.03, 3);
                    }
                }
            }
            write_text_file(o.out_dir + "/denjoy_circle.svg", svg.str());
        }
    }
    return 0;
}

// ---- denjoy torus -----------------------------------------------------------------

inline int cmd_denjoy_torus(const CommonOpts& o, std::ostream& out) {
    const Scene sc = load_scene(o.scene_path);
    const std::string hash = scene_hash(sc);
    const RoundDomainScene rd = scene_torus(sc);
    const IsometryForcingReport forcing = isometry_forcing_check(rd);
    double min_r = rd.radii.front(), max_r = rd.radii.front();
    for (double r : rd.radii) {
        min_r = std::min(min_r, r);
        max_r = std::max(max_r, r);
    }
    const VolumeVerdict volume = volume_obstruction(static_cast<int>(rd.rho.size()), min_r, 1.0,
                                                    static_cast<std::uint64_t>(rd.count));
    const double disc = star_discrepancy(rd.rho, 10000);

    out << "scene " << hash << " balls " << rd.count << " shrink steps " << rd.shrink_count << "\n";
    out << "radii in [" << format_double(min_r) << ", " << format_double(max_r) << "]\n";
    out << "similarity: lambda " << format_double(forcing.fit.lambda) << " residual "
        << format_double(forcing.fit.residual) << " verdict " << to_string(forcing.verdict)
        << (forcing.isometry ? " (isometry)" : "") << "\n";
    out << "volume: capacity " << format_double(volume.capacity) << " max count " << volume.n_max
        << (volume.contradiction ? " CONTRADICTION" : "") << "\n";
    out << "discrepancy " << format_double(disc) << " over 10000 orbit points\n";

    if (!o.out_dir.empty()) {
        ensure_directory(o.out_dir);
        Json summary = summary_skeleton(hash);
        summary["count"] = rd.count;
        summary["shrink_steps"] = rd.shrink_count;
        summary["min_radius"] = min_r;
        summary["max_radius"] = max_r;
        summary["similarity"]["lambda"] = forcing.fit.lambda;
        summary["similarity"]["residual"] = forcing.fit.residual;
        summary["similarity"]["verdict"] = to_string(forcing.verdict);
        summary["similarity"]["isometry"] = forcing.isometry;
        summary["volume"]["capacity"] = volume.capacity;
        summary["volume"]["max_count"] = volume.n_max;
        summary["volume"]["contradiction"] = volume.contradiction;
        summary["discrepancy"] = disc;
        write_text_file(o.out_dir + "/summary.json", render_json(summary));
        if (o.format == "csv") {
            std::vector<std::string> cols = {"k"};
            const int n = static_cast<int>(rd.rho.size());
            for (int i = 0; i < n; ++i) cols.push_back("lift_" + std::to_string(i));
            for (int i = 0; i < n; ++i) cols.push_back("center_" + std::to_string(i));
            cols.push_back("radius");
            CsvTable csv(hash, cols);
            for (int k = 0; k < rd.count; ++k) {
                std::vector<std::string> cells = {std::to_string(k)};
                for (int i = 0; i < n; ++i) cells.push_back(format_double(rd.lift_centers[static_cast<std::size_t>(k)][i]));
                for (int i = 0; i < n; ++i) cells.push_back(format_double(rd.centers[static_cast<std::size_t>(k)][i]));
                cells.push_back(format_double(rd.radii[static_cast<std::size_t>(k)]));
                csv.row(cells);
            }
            write_text_file(o.out_dir + "/denjoy_torus.csv", csv.str());
        } else if (o.format == "svg") {
            if (rd.rho.size() != 2) throw ConfigError("svg reports need dimension 2");
            SvgCanvas svg;
            svg.set_stroke(0.003);
            svg.add_segment(0, 0, 1, 0, 7);
            svg.add_segment(1, 0, 1, 1, 7);
            svg.add_segment(1, 1, 0, 1, 7);
            svg.add_segment(0, 1, 0, 0, 7);
            for (int k = 0; k < rd.count; ++k)
                svg.add_circle(rd.centers[static_cast<std::size_t>(k)][0],
                               rd.centers[static_cast<std::size_t>(k)][1],
                               rd.radii[static_cast<std::size_t>(k)], k % 8, true);
            write_text_file(o.out_dir + "/denjoy_torus.svg", svg.str());
        }
    }
    return 0;
}

}  // namespace cli

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    CLI::App app{"inversive-geometry laboratory"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    cli::CommonOpts o;
    int selected = -1;
    CLI::App* c_validate = app.add_subcommand("validate", "check a scene's ball configuration");
    cli::add_common(c_validate, o, false, false, false);
    c_validate->callback([&] { selected = 0; });
    CLI::App* c_orbit = app.add_subcommand("orbit", "enumerate reflected balls");
    cli::add_common(c_orbit, o, true, false, false);
    c_orbit->callback([&] { selected = 1; });
    CLI::App* c_extend = app.add_subcommand("extend", "measure equivariance of the extension");
    cli::add_common(c_extend, o, true, true, false);
    c_extend->callback([&] { selected = 2; });
    CLI::App* c_dil = app.add_subcommand("dilatation", "survey local dilatation over a grid");
    cli::add_common(c_dil, o, true, true, true);
    c_dil->callback([&] { selected = 3; });
    CLI::App* c_denjoy = app.add_subcommand("denjoy", "minimal-but-not-conjugate constructions");
    c_denjoy->require_subcommand(1);
    CLI::App* c_circle = c_denjoy->add_subcommand("circle", "blow up a circle rotation");
    cli::add_common(c_circle, o, false, true, false);
    c_circle->callback([&] { selected = 4; });
    CLI::App* c_torus = c_denjoy->add_subcommand("torus", "round-ball orbit scenes on the torus");
    cli::add_common(c_torus, o, false, false, false);
    c_torus->callback([&] { selected = 5; });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::Success& e) {  // --help, --help-all, and friends
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 3;
    }

    int rc = 0;
    try {
        switch (selected) {
            case 0: rc = cli::cmd_validate(o, out); break;
            case 1: rc = cli::cmd_orbit(o, out); break;
            case 2: rc = cli::cmd_extend(o, out); break;
            case 3: rc = cli::cmd_dilatation(o, out); break;
            case 4: rc = cli::cmd_denjoy_circle(o, out); break;
            case 5: rc = cli::cmd_denjoy_torus(o, out); break;
            default: err << "usage error: no command selected\n"; return 3;
        }
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const EvaluationError& e) {
        err << "evaluation error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    err << "done in " << dt.count() << " ms\n";
    return rc;
}

}
