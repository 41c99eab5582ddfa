#include "typecsp/errors.hpp"
#include "typecsp/polymorphism.hpp"
#include "typecsp/project.hpp"
#include "typecsp/serialize.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace typecsp;

namespace {

// exit codes: 0 answers (including UNSAT/HardCandidate), 2 validation errors,
// 3 resource limits, 1 unexpected failures
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

struct CommonOptions {
    std::uint64_t seed = 0;
    bool shuffle_ties = false;
    bool stats = false;
    std::optional<double> time_limit;
    std::optional<std::uint64_t> node_limit;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--seed", opt.seed, "Seed behind all randomized tie-breaking");
    cmd->add_flag("--shuffle-ties", opt.shuffle_ties, "Shuffle variable-order ties by seed");
    cmd->add_flag("--stats", opt.stats, "Include solver statistics in the report");
    cmd->add_option("--time-limit", opt.time_limit, "Solver time limit in seconds");
    cmd->add_option("--node-limit", opt.node_limit, "Solver node limit");
    cmd->add_option("--out", opt.out, "Write the JSON report to a file instead of stdout");
}

SolverConfig solver_config(const CommonOptions& opt) {
    SolverConfig config;
    config.seed = opt.seed;
    config.shuffle_ties = opt.shuffle_ties;
    if (opt.time_limit) config.time_limit_seconds = *opt.time_limit;
    if (opt.node_limit) config.node_limit = *opt.node_limit;
    return config;
}

void emit(const Json& report, const CommonOptions& opt) {
    if (opt.out.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    std::ofstream f(opt.out);
    if (!f) throw ValidationError("cannot write '" + opt.out + "'");
    f << report.dump(2) << "\n";
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what(), path);
    }
}

ProjectFile load_project_checked(const std::string& path) {
    ProjectFile project = load_project_file(path);
    if (project.was_stabilised)
        std::cerr << "note: partition was not stabilised; finite blocks were split "
                     "into singletons and formulas rewritten\n";
    return project;
}

CspInstance pick_instance(const ProjectFile& project, const std::string& instance_path,
                          int index) {
    if (!instance_path.empty()) {
        CspInstance psi = instance_from_json(read_json_file(instance_path));
        psi.validate(project.reduct);
        return psi;
    }
    if (project.instances.empty())
        throw ValidationError("the project has no instances; pass --instance");
    if (index < 0 || index >= (int)project.instances.size())
        throw ValidationError("instance index " + std::to_string(index) + " out of range");
    return project.instances[index];
}

IdentitySpec parse_identity(const std::string& text, bool idempotent) {
    if (text == "siggers") return IdentitySpec::siggers(idempotent);
    if (text == "wnupair") return IdentitySpec::wnu_pair34(idempotent);
    auto colon = text.find(':');
    if (colon != std::string::npos) {
        std::string head = text.substr(0, colon);
        int k = 0;
        try {
            k = std::stoi(text.substr(colon + 1));
        } catch (...) {
            throw ValidationError("bad identity parameter in '" + text + "'");
        }
        if (head == "cyclic") return IdentitySpec::cyclic(k, idempotent);
        if (head == "wnu") return IdentitySpec::wnu(k, idempotent);
    }
    throw ValidationError("unknown identity '" + text +
                          "'; expected siggers|cyclic:K|wnu:K|wnupair");
}

Json stats_json(const SolveStats& stats) {
    return {{"nodes", stats.nodes}, {"propagations", stats.propagations}};
}

// ---------------------------------------------------------------------------

int cmd_types(const std::string& project_path, std::optional<int> m, const CommonOptions& opt) {
    ProjectFile project = load_project_checked(project_path);
    int mm = m ? *m : choose_m(project.partition, project.reduct, Purpose::Reduce);
    auto types = enumerate_types(project.partition, mm);
    Json list = Json::array();
    for (const auto& t : types) list.push_back(mtype_to_json(project.partition, t));
    emit({{"m", mm}, {"count", types.size()}, {"types", list}}, opt);
    return kExitOk;
}

int cmd_build(const std::string& project_path, std::optional<int> m, bool materialize_comp,
              const CommonOptions& opt) {
    ProjectFile project = load_project_checked(project_path);
    int mm = m ? *m : choose_m(project.partition, project.reduct, Purpose::Reduce);
    TypeStructure t = TypeStructure::build(project.partition, project.reduct, mm);
    emit(type_structure_to_json(t, materialize_comp), opt);
    return kExitOk;
}

int cmd_reduce(const std::string& project_path, const std::string& instance_path, int index,
               std::optional<int> m, AttachPolicy policy, const CommonOptions& opt) {
    ProjectFile project = load_project_checked(project_path);
    CspInstance psi = pick_instance(project, instance_path, index);
    int mm = m ? *m : choose_m(project.partition, project.reduct, Purpose::Reduce);
    TypeStructure t = TypeStructure::build(project.partition, project.reduct, mm);
    FiniteCspInstance phi = reduce(psi, t, policy);
    emit(reduced_to_json(phi, t), opt);
    return kExitOk;
}

int cmd_solve(const std::string& project_path, const std::string& instance_path, int index,
              const std::string& prebuilt, std::optional<int> m, AttachPolicy policy,
              const CommonOptions& opt) {
    ProjectFile project = load_project_checked(project_path);
    CspInstance psi = pick_instance(project, instance_path, index);

    TypeStructure t = [&] {
        if (!prebuilt.empty()) return type_structure_from_json(read_json_file(prebuilt));
        int mm = m ? *m : choose_m(project.partition, project.reduct, Purpose::Reduce);
        return TypeStructure::build(project.partition, project.reduct, mm);
    }();

    FiniteCspInstance phi = reduce(psi, t, policy);
    ReductionMetrics mets = metrics(phi);
    SolveResult res = solve(to_solver_instance(phi, t), solver_config(opt));

    Json report;
    report["m"] = t.m();
    report["metrics"] = {{"variables", mets.variables},
                         {"unary_constraints", mets.unary_constraints},
                         {"comp_constraints", mets.comp_constraints}};
    if (opt.stats) report["stats"] = stats_json(res.stats);

    switch (res.status) {
    case SolveStatus::Sat: {
        Witness w = lift_solution(psi, phi, t, res.assignment);
        if (!verify_witness(psi, w, t.partition(), t.reduct()))
            throw Error("internal: witness verification failed on a SAT result");
        report["verdict"] = "SAT";
        report["witness"] = witness_to_json(w);
        emit(report, opt);
        return kExitOk;
    }
    case SolveStatus::Unsat:
        report["verdict"] = "UNSAT";
        emit(report, opt);
        return kExitOk;
    default:
        report["verdict"] = res.status == SolveStatus::NodeLimit ? "NODE_LIMIT" : "TIME_LIMIT";
        emit(report, opt);
        return kExitResource;
    }
}

int cmd_classify(const std::string& project_path, int expand_override,
                 const CommonOptions& opt) {
    ProjectFile project = load_project_checked(project_path);
    ClassifyOptions options;
    options.assume_core_and_tame =
        project.assert_model_complete_core && project.assert_tame_endomorphisms;
    if (expand_override > 0) options.expansion = ExpansionMode::Always;
    if (expand_override < 0) options.expansion = ExpansionMode::Never;
    options.solver = solver_config(opt);

    ClassifyReport report = classify_reduct(project.partition, project.reduct, options);

    Json out;
    switch (report.verdict) {
    case ClassifyReport::Verdict::Tractable: out["verdict"] = "Tractable"; break;
    case ClassifyReport::Verdict::HardCandidate: out["verdict"] = "HardCandidate"; break;
    case ClassifyReport::Verdict::NotApplicable: out["verdict"] = "NotApplicable"; break;
    case ClassifyReport::Verdict::ResourceLimit: out["verdict"] = "ResourceLimit"; break;
    }
    out["explanation"] = report.explanation;
    out["expanded_with_constants"] = report.expanded;
    out["m"] = report.m;
    out["type_domain_size"] = report.type_domain_size;
    out["asserted"] = {{"is_model_complete_core", project.assert_model_complete_core},
                       {"tame_endomorphisms", project.assert_tame_endomorphisms}};
    if (report.witness) out["witness"] = operation_to_json(*report.witness);
    if (opt.stats) out["stats"] = stats_json(report.stats);
    emit(out, opt);
    return report.verdict == ClassifyReport::Verdict::ResourceLimit ? kExitResource : kExitOk;
}

int cmd_polysearch(const std::string& structure_path, const std::string& identity,
                   bool idempotent, const CommonOptions& opt) {
    IdentitySpec id = parse_identity(identity, idempotent);
    Json j = read_json_file(structure_path);

    PolymorphismSearch search;
    if (j.contains("domain")) {
        TypeStructure t = type_structure_from_json(j);
        search = has_polymorphism(t, id, solver_config(opt));
    } else {
        FiniteStructure s = finite_structure_from_json(j);
        search = has_polymorphism(s, id, solver_config(opt));
    }

    Json out;
    out["identity"] = id.describe();
    if (opt.stats) out["stats"] = stats_json(search.stats);
    switch (search.status) {
    case PolymorphismSearch::Status::Found: {
        out["found"] = true;
        Json tables = Json::array();
        for (const auto& t : search.tables) tables.push_back(operation_to_json(t));
        out["tables"] = tables;
        emit(out, opt);
        return kExitOk;
    }
    case PolymorphismSearch::Status::None:
        out["found"] = false;
        emit(out, opt);
        return kExitOk;
    default:
        out["verdict"] = search.status == PolymorphismSearch::Status::NodeLimit ? "NODE_LIMIT"
                                                                                : "TIME_LIMIT";
        emit(out, opt);
        return kExitResource;
    }
}

int cmd_algebra_mashup(const std::string& algebra_path, const std::string& g,
                       const std::string& h, bool closure, const CommonOptions& opt) {
    FiniteAlgebra a = algebra_from_json(read_json_file(algebra_path));
    MashupVerdict verdict = check_mashup_lemma(a, g, h, closure);
    Json out{{"premise", verdict.premise},
             {"conclusion", verdict.conclusion},
             {"lemma_respected", verdict.lemma_respected}};
    if (verdict.gap)
        out["missing_case"] = {{"ell", verdict.gap->ell}, {"r", verdict.gap->r},
                               {"s", verdict.gap->s}};
    emit(out, opt);
    return kExitOk;
}

int cmd_algebra_hs_trivial(const std::string& algebra_path, const CommonOptions& opt) {
    FiniteAlgebra a = algebra_from_json(read_json_file(algebra_path));
    auto q = has_trivial_two_quotient(a);
    Json out;
    out["found"] = q.has_value();
    if (q) {
        Json proj = Json::object();
        for (std::size_t i = 0; i < a.ops.size(); ++i)
            proj[a.ops[i].name] = q->projection_index[i];
        out["quotient"] = {{"subalgebra", q->carrier}, {"side", q->side},
                           {"projection_index", proj}};
    }
    emit(out, opt);
    return kExitOk;
}

int cmd_algebra_closure(const std::string& algebra_path, int max_arity,
                        const CommonOptions& opt) {
    FiniteAlgebra a = algebra_from_json(read_json_file(algebra_path));
    auto closure = clone_closure(a, max_arity);
    Json tables = Json::array();
    for (const auto& t : closure) tables.push_back(operation_to_json(t));
    emit({{"count", closure.size()}, {"tables", tables}}, opt);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"type-structure toolkit for CSPs over reducts of unary structures"};
    app.require_subcommand(1);

    std::string project_path, instance_path, prebuilt, structure_path, algebra_path;
    std::string identity = "siggers", g_name, h_name, policy_name = "all";
    std::optional<int> m_override;
    int index = 0, max_arity = 2;
    bool materialize_comp = false, idempotent = false, closure = false;
    int expand_override = 0;
    CommonOptions common[8];

    auto policy = [&]() {
        if (policy_name == "all") return AttachPolicy::AllCovering;
        if (policy_name == "single") return AttachPolicy::SingleCanonical;
        throw ValidationError("unknown policy '" + policy_name + "'; expected all|single");
    };

    auto* types = app.add_subcommand("types", "List the m-types of the project's partition");
    types->add_option("--project", project_path, "Project JSON file")->required();
    types->add_option("--m", m_override, "Tuple length (default: chosen from the project)");
    add_common(types, common[0]);

    auto* build = app.add_subcommand("build", "Build and export the type structure");
    build->add_option("--project", project_path, "Project JSON file")->required();
    build->add_option("--m", m_override, "Tuple length (default: chosen from the project)");
    build->add_flag("--materialize-comp", materialize_comp,
                    "Materialize all Comp relations in the export");
    add_common(build, common[1]);

    auto* reduce_cmd = app.add_subcommand("reduce", "Translate an instance to the finite CSP");
    reduce_cmd->add_option("--project", project_path, "Project JSON file")->required();
    reduce_cmd->add_option("--instance", instance_path, "Instance JSON file");
    reduce_cmd->add_option("--index", index, "Instance index within the project");
    reduce_cmd->add_option("--m", m_override, "Tuple length");
    reduce_cmd->add_option("--policy", policy_name, "Constraint attachment: all|single");
    add_common(reduce_cmd, common[2]);

    auto* solve_cmd = app.add_subcommand("solve", "Reduce, solve, lift, and verify");
    solve_cmd->add_option("--project", project_path, "Project JSON file")->required();
    solve_cmd->add_option("--instance", instance_path, "Instance JSON file");
    solve_cmd->add_option("--index", index, "Instance index within the project");
    solve_cmd->add_option("--prebuilt", prebuilt, "Use an exported type structure");
    solve_cmd->add_option("--m", m_override, "Tuple length");
    solve_cmd->add_option("--policy", policy_name, "Constraint attachment: all|single");
    add_common(solve_cmd, common[3]);

    auto* classify = app.add_subcommand("classify", "Tractability classification of the reduct");
    classify->add_option("--project", project_path, "Project JSON file")->required();
    auto* ex = classify->add_flag("--expand", "Force the constant expansion");
    auto* nex = classify->add_flag("--no-expand", "Skip the constant expansion");
    add_common(classify, common[4]);

    auto* poly = app.add_subcommand("polysearch", "Polymorphism search on a finite structure");
    poly->add_option("--structure", structure_path,
                     "Type-structure or finite-structure JSON file")->required();
    poly->add_option("--identity", identity, "siggers|cyclic:K|wnu:K|wnupair");
    poly->add_flag("--idempotent", idempotent, "Additionally pin f(x,..,x) = x");
    add_common(poly, common[5]);

    auto* algebra = app.add_subcommand("algebra", "Finite universal algebra checks");
    algebra->require_subcommand(1);
    auto* mashup = algebra->add_subcommand("check-mashup", "Mashup premise and conclusion");
    mashup->add_option("--algebra", algebra_path, "Algebra JSON file")->required();
    mashup->add_option("g-name", g_name, "Name of g")->required();
    mashup->add_option("h-name", h_name, "Name of h")->required();
    mashup->add_flag("--closure", closure, "Search mashups in the clone closure");
    add_common(mashup, common[6]);
    auto* hs = algebra->add_subcommand("hs-trivial", "Trivial two-element quotient search");
    hs->add_option("--algebra", algebra_path, "Algebra JSON file")->required();
    add_common(hs, common[7]);
    auto* clo = algebra->add_subcommand("closure", "Clone closure up to an arity");
    clo->add_option("--algebra", algebra_path, "Algebra JSON file")->required();
    clo->add_option("--max-arity", max_arity, "Largest arity in the closure");
    add_common(clo, common[7]);

    CLI11_PARSE(app, argc, argv);

    try {
        if (types->parsed()) return cmd_types(project_path, m_override, common[0]);
        if (build->parsed())
            return cmd_build(project_path, m_override, materialize_comp, common[1]);
        if (reduce_cmd->parsed())
            return cmd_reduce(project_path, instance_path, index, m_override, policy(),
                              common[2]);
        if (solve_cmd->parsed())
            return cmd_solve(project_path, instance_path, index, prebuilt, m_override, policy(),
                             common[3]);
        if (classify->parsed()) {
            if (ex->count()) expand_override = 1;
            if (nex->count()) expand_override = -1;
            if (ex->count() && nex->count())
                throw ValidationError("--expand and --no-expand are mutually exclusive");
            return cmd_classify(project_path, expand_override, common[4]);
        }
        if (poly->parsed())
            return cmd_polysearch(structure_path, identity, idempotent, common[5]);
        if (algebra->parsed()) {
            if (mashup->parsed())
                return cmd_algebra_mashup(algebra_path, g_name, h_name, closure, common[6]);
            if (hs->parsed()) return cmd_algebra_hs_trivial(algebra_path, common[7]);
            if (clo->parsed()) return cmd_algebra_closure(algebra_path, max_arity, common[7]);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const GuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return kExitValidation;
}
