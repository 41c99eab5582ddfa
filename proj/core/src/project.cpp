#include "typecsp/project.hpp"

#include "typecsp/errors.hpp"

#include <fstream>

namespace typecsp {

ProjectFile load_project(const Json& j) {
    if (!j.is_object()) throw ValidationError("project must be a JSON object", "/");
    auto require = [&](const char* key) -> const Json& {
        auto it = j.find(key);
        if (it == j.end())
            throw ValidationError(std::string("missing field '") + key + "'", "/");
        return *it;
    };

    ProjectFile project;
    project.partition = partition_from_json(require("partition"), "/partition/");
    project.reduct = reduct_from_json(project.partition, require("reduct"), "/reduct/");

    if (auto it = j.find("instances"); it != j.end()) {
        if (!it->is_array()) throw ValidationError("'instances' must be an array", "/instances/");
        for (std::size_t i = 0; i < it->size(); ++i) {
            CspInstance psi =
                instance_from_json((*it)[i], "/instances/" + std::to_string(i) + "/");
            psi.validate(project.reduct);
            project.instances.push_back(std::move(psi));
        }
    }
    if (auto it = j.find("assertions"); it != j.end()) {
        if (!it->is_object())
            throw ValidationError("'assertions' must be an object", "/assertions/");
        if (auto f = it->find("is_model_complete_core"); f != it->end())
            project.assert_model_complete_core = f->get<bool>();
        if (auto f = it->find("tame_endomorphisms"); f != it->end())
            project.assert_tame_endomorphisms = f->get<bool>();
    }

    if (!project.partition.stabilised()) {
        Stabilisation st = stabilise(project.partition);
        project.partition = st.spec;
        for (auto& rel : project.reduct.relations)
            rel.def = replace_blocks(rel.def, st.rewrite);
        project.was_stabilised = true;
    }
    return project;
}

ProjectFile load_project_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what(), path);
    }
    return load_project(j);
}

} // namespace typecsp
