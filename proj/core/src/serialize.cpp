#include "msgt/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msgt/errors.hpp"

namespace msgt {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file '" + path + "'");
    out << content;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t";
    const std::size_t n = traj.states.empty() ? 0 : traj.states[0].size();
    for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
    out << ",u,y\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_double(traj.times[k]);
        for (double c : traj.states[k]) out << "," << format_double(c);
        out << "," << format_double(traj.inputs[k]) << "," << format_double(traj.outputs[k])
            << "\n";
    }
    return out.str();
}

std::string loop_trajectory_to_csv(const LoopTrajectory& traj, std::size_t dim_x) {
    std::ostringstream out;
    const std::size_t n = traj.states.empty() ? 0 : traj.states[0].size();
    out << "t";
    for (std::size_t i = 1; i <= dim_x; ++i) out << ",x" << i;
    for (std::size_t i = 1; i <= n - dim_x; ++i) out << ",z" << i;
    out << ",y,w\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << format_double(traj.times[k]);
        for (double c : traj.states[k]) out << "," << format_double(c);
        out << "," << format_double(traj.y[k]) << "," << format_double(traj.w[k]) << "\n";
    }
    return out.str();
}

std::string characteristic_samples_csv(const MultiMap& map, double lo, double hi, int samples) {
    if (samples < 2) throw InputError("characteristic sampling needs at least 2 points");
    std::ostringstream out;
    out << "u,branch_index,value\n";
    for (int i = 0; i < samples; ++i) {
        const double u = lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
        const std::vector<double> vals = map.values(u);
        for (std::size_t b = 0; b < vals.size(); ++b) {
            out << format_double(u) << "," << b << "," << format_double(vals[b]) << "\n";
        }
    }
    return out.str();
}

std::string paths_to_csv(const PathSet& set, double start) {
    std::ostringstream out;
    out << "start,step,value,branch\n";
    for (std::size_t p = 0; p < set.paths.size(); ++p) {
        const InclusionPath& path = set.paths[p];
        out << "# path " << p << ": " << to_string(path.kind);
        if (path.kind == PathKind::periodic) out << " period=" << path.period;
        if (path.kind == PathKind::converged) out << " limit=" << format_double(path.limit);
        if (!path.note.empty()) out << " (" << path.note << ")";
        out << "\n";
        for (std::size_t k = 0; k < path.values.size(); ++k) {
            out << format_double(start) << "," << k << "," << format_double(path.values[k]) << ",";
            if (k == 0) {
                out << -1;
            } else {
                out << path.branches[k - 1];
            }
            out << "\n";
        }
    }
    if (set.truncated) out << "# truncated: branch cap reached\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

ordered_json path_to_json(const InclusionPath& path) {
    ordered_json j;
    j["values"] = path.values;
    j["branches"] = path.branches;
    j["classification"] = to_string(path.kind);
    if (path.kind == PathKind::converged) j["limit"] = path.limit;
    if (path.kind == PathKind::periodic) {
        j["period"] = path.period;
        j["orbit"] = path.orbit;
    }
    if (!path.note.empty()) j["note"] = path.note;
    if (path.escaped) j["escaped"] = true;
    return j;
}

ordered_json condition_to_json(const MonotoneConditionReport& c) {
    ordered_json j;
    j["pass"] = c.pass;
    j["orientation_ok"] = c.orientation_ok;
    if (!c.orientation_note.empty()) j["orientation_note"] = c.orientation_note;
    j["monotone_pass"] = c.monotone.pass;
    j["samples"] = c.monotone.samples;
    if (c.monotone.witness) {
        ordered_json w;
        w["p"] = c.monotone.witness->p;
        w["q"] = c.monotone.witness->q;
        w["inputs"] = c.monotone.witness->input_pair;
        w["t"] = c.monotone.witness->time;
        w["what"] = c.monotone.witness->what;
        j["witness"] = w;
    }
    return j;
}

}  // namespace

std::string profile_to_json(const CardinalityProfile& profile) {
    ordered_json j;
    ordered_json intervals = ordered_json::array();
    for (const auto& run : profile.intervals) {
        intervals.push_back(ordered_json::array({run.lo, run.hi, run.count}));
    }
    j["intervals"] = intervals;
    j["folds"] = profile.folds;
    j["grid"] = profile.grid;
    return j.dump(2);
}

std::string classification_to_json(const GridClassification& cls) {
    ordered_json j;
    j["verdict"] = to_string(cls.verdict);
    ordered_json starts = ordered_json::array();
    for (const auto& s : cls.starts) {
        ordered_json js;
        js["start"] = s.start;
        js["converged"] = s.converged;
        js["periodic"] = s.periodic;
        js["undetermined"] = s.undetermined;
        js["escaped"] = s.escaped;
        js["truncated"] = s.truncated;
        ordered_json paths = ordered_json::array();
        for (const auto& p : s.paths) paths.push_back(path_to_json(p));
        js["paths"] = paths;
        starts.push_back(js);
    }
    j["starts"] = starts;
    return j.dump(2);
}

std::string fixed_points_to_json(const FixedPointResult& result) {
    ordered_json j;
    j["fixed_points"] = result.points;
    j["rescan_warning"] = result.rescan_warning;
    return j.dump(2);
}

std::string verification_report_to_json(const VerificationReport& report) {
    ordered_json j;
    j["condition1"] = condition_to_json(report.condition1);
    j["condition2"] = condition_to_json(report.condition2);

    ordered_json c3;
    c3["pass"] = report.condition3.pass;
    c3["kx_singleton"] = report.condition3.kx_singleton;
    if (!report.condition3.kx_witness.empty()) c3["kx_witness"] = report.condition3.kx_witness;
    c3["kz_locally_bounded"] = report.condition3.kz_locally_bounded;
    c3["kz_sup_coarse"] = report.condition3.kz_sup_coarse;
    c3["kz_sup_fine"] = report.condition3.kz_sup_fine;
    j["condition3"] = c3;

    ordered_json c4;
    c4["pass"] = report.condition4.pass;
    ordered_json bounded;
    bounded["pass"] = report.condition4.bounded.pass;
    bounded["sup_norm"] = report.condition4.bounded.sup_norm;
    if (!report.condition4.bounded.witness.empty()) {
        bounded["witness"] = report.condition4.bounded.witness;
    }
    c4["bounded"] = bounded;
    ordered_json inc;
    inc["route"] = report.condition4.inclusion.route;
    inc["pass"] = report.condition4.inclusion.pass;
    inc["v_inclusion_verdict"] = to_string(report.condition4.inclusion.v_verdict);
    inc["w_inclusion_verdict"] = to_string(report.condition4.inclusion.w_verdict);
    inc["images_converge"] = report.condition4.inclusion.images_converge;
    if (!report.condition4.inclusion.witness.empty()) {
        inc["witness"] = report.condition4.inclusion.witness;
    }
    c4["inclusion"] = inc;
    j["condition4"] = c4;

    j["loop_equilibria"] = report.loop_equilibria;
    ordered_json aset = ordered_json::array();
    for (const auto& p : report.attractive_set) {
        ordered_json jp;
        jp["w"] = p.w_eq;
        jp["x"] = p.x_point;
        jp["z_set"] = p.z_set;
        aset.push_back(jp);
    }
    j["attractive_set"] = aset;
    j["verdict"] = report.verdict;
    if (!report.blocking.empty()) j["blocking"] = report.blocking;

    ordered_json budgets;
    budgets["monotone_samples"] = report.budgets.monotone_samples;
    budgets["monotone_t_final"] = report.budgets.monotone_t_final;
    budgets["seed"] = report.budgets.seed;
    budgets["char_grid"] = report.budgets.char_grid;
    budgets["loop_grid_w"] = report.budgets.loop_grid_w;
    budgets["loop_grid_h"] = report.budgets.loop_grid_h;
    budgets["t_final"] = report.budgets.t_final;
    budgets["escape_radius"] = report.budgets.escape_radius;
    budgets["inclusion_starts"] = report.budgets.inclusion_starts;
    budgets["depth"] = report.budgets.depth;
    budgets["branch_cap"] = report.budgets.branch_cap;
    budgets["conv_tol"] = report.budgets.conv_tol;
    budgets["fix_tol"] = report.budgets.fix_tol;
    budgets["fix_grid"] = report.budgets.fix_grid;
    budgets["dist_tol"] = report.budgets.dist_tol;
    j["budgets"] = budgets;
    return j.dump(2);
}

std::string convergence_report_to_json(const ConvergenceReport& report) {
    ordered_json j;
    j["pass"] = report.pass;
    j["dist_tol"] = report.dist_tol;
    ordered_json entries = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json je;
        je["start"] = e.start;
        je["terminal_distance"] = e.terminal_distance;
        je["selected_pair"] = e.selected_pair;
        je["selected_z"] = e.selected_z;
        je["max_abs_x"] = e.max_abs_x;
        je["bounded"] = e.bounded;
        je["pass"] = e.pass;
        if (!e.note.empty()) je["note"] = e.note;
        entries.push_back(je);
    }
    j["entries"] = entries;
    return j.dump(2);
}

std::string characteristic_report_to_json(const CharacteristicReport& report) {
    auto condition = [](const CharacteristicReport::Condition& c) {
        ordered_json j;
        j["pass"] = c.pass;
        if (!c.detail.empty()) j["detail"] = c.detail;
        j["witnesses"] = c.witnesses;
        return j;
    };
    ordered_json j;
    j["coverage"] = condition(report.coverage);
    j["lyapunov"] = condition(report.lyapunov);
    j["isolation"] = condition(report.isolation);
    j["no_cycles"] = condition(report.no_cycles);
    j["pass"] = report.pass;
    ordered_json eq = ordered_json::array();
    for (const auto& [u, pairs] : report.equilibria_by_input) {
        ordered_json ju;
        ju["u"] = u;
        ordered_json list = ordered_json::array();
        for (const auto& p : pairs) {
            ordered_json jp;
            jp["state"] = p.state;
            jp["stability"] = to_string(p.stability);
            jp["residual"] = p.residual;
            list.push_back(jp);
        }
        ju["equilibria"] = list;
        eq.push_back(ju);
    }
    j["equilibria_by_input"] = eq;
    return j.dump(2);
}

std::string verification_report_to_text(const VerificationReport& report) {
    std::ostringstream out;
    auto mark = [](bool pass) { return pass ? "pass" : "FAIL"; };

    out << "condition1 (first subsystem monotone, y-channel standard): "
        << mark(report.condition1.pass) << "\n";
    out << "condition2 (second subsystem monotone, w-channel opposite): "
        << mark(report.condition2.pass) << "\n";
    if (report.condition2.monotone.witness) {
        out << "  witness: " << report.condition2.monotone.witness->what << " at t="
            << report.condition2.monotone.witness->time << "\n";
    }
    out << "condition3 (k_x singleton, k_z locally bounded): " << mark(report.condition3.pass)
        << "  [sup " << report.condition3.kz_sup_coarse << " -> " << report.condition3.kz_sup_fine
        << "]\n";
    out << "condition4 (bounded trajectories, inclusion converges): "
        << mark(report.condition4.pass) << "  [route " << report.condition4.inclusion.route
        << ", v: " << to_string(report.condition4.inclusion.v_verdict)
        << ", w: " << to_string(report.condition4.inclusion.w_verdict) << "]\n";

    out << "loop equilibria:";
    for (double w : report.loop_equilibria) out << " " << w;
    out << "\n";
    for (const auto& p : report.attractive_set) {
        out << "attractive point: x = " << p.x_point << ", z in {";
        for (std::size_t i = 0; i < p.z_set.size(); ++i) {
            if (i) out << ", ";
            out << p.z_set[i];
        }
        out << "}\n";
    }
    out << "verdict: " << report.verdict;
    if (!report.blocking.empty()) out << " (blocking: " << report.blocking << ")";
    out << "\n";
    return out.str();
}

VerificationBudget budget_from_json(const std::string& text) {
    VerificationBudget budget;
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("malformed budget JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "monotone_samples") budget.monotone_samples = value.get<std::size_t>();
        else if (key == "monotone_t_final") budget.monotone_t_final = value.get<double>();
        else if (key == "seed") budget.seed = value.get<std::uint64_t>();
        else if (key == "char_grid") budget.char_grid = value.get<int>();
        else if (key == "loop_grid_w") budget.loop_grid_w = value.get<int>();
        else if (key == "loop_grid_h") budget.loop_grid_h = value.get<int>();
        else if (key == "t_final") budget.t_final = value.get<double>();
        else if (key == "escape_radius") budget.escape_radius = value.get<double>();
        else if (key == "inclusion_starts") budget.inclusion_starts = value.get<int>();
        else if (key == "depth") budget.depth = value.get<int>();
        else if (key == "branch_cap") budget.branch_cap = value.get<int>();
        else if (key == "conv_tol") budget.conv_tol = value.get<double>();
        else if (key == "fix_tol") budget.fix_tol = value.get<double>();
        else if (key == "fix_grid") budget.fix_grid = value.get<int>();
        else if (key == "dist_tol") budget.dist_tol = value.get<double>();
        else if (key == "rel_tol") budget.integrate.rel_tol = value.get<double>();
        else if (key == "abs_tol") budget.integrate.abs_tol = value.get<double>();
        else throw InputError("unknown budget key '" + key + "'");
    }
    return budget;
}

}  // namespace msgt
