#include "diffpair/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace diffpair {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read file: " + path);
    return f;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

MixtureWorld load_world(const std::string& path) {
    std::ifstream f = open_in(path);
    MixtureWorld w;
    std::string line;
    int lineno = 0;
    bool have_dims = false;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (key == "dims") {
            if (!(ss >> w.dims) || w.dims < 1) parse_fail(path, lineno, "key 'dims' needs a positive integer");
            have_dims = true;
        } else if (key == "component") {
            if (!have_dims) parse_fail(path, lineno, "key 'component' before 'dims'");
            MixtureComponent c;
            std::string role;
            if (!(ss >> c.class_id >> role >> c.weight))
                parse_fail(path, lineno, "key 'component' needs <class> <role> <weight>");
            c.mean.resize(static_cast<std::size_t>(w.dims));
            for (auto& m : c.mean)
                if (!(ss >> m)) parse_fail(path, lineno, "key 'component' has too few mean entries");
            if (!(ss >> c.variance)) parse_fail(path, lineno, "key 'component' is missing the variance");
            ClassRole r;
            try {
                r = role_from_name(role);
            } catch (const std::exception&) {
                parse_fail(path, lineno, "key 'component' has unknown role '" + role + "'");
            }
            auto it = w.class_roles.find(c.class_id);
            if (it != w.class_roles.end() && it->second != r)
                parse_fail(path, lineno, "key 'component' changes the role of class " +
                                             std::to_string(c.class_id));
            w.class_roles[c.class_id] = r;
            w.components.push_back(std::move(c));
        } else {
            parse_fail(path, lineno, "unknown key '" + key + "'");
        }
    }
    if (!have_dims) throw std::runtime_error(path + ": missing key 'dims'");
    w.known_count = static_cast<int>(w.classes_with_role(ClassRole::known).size());
    try {
        w.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return w;
}

void save_world(const MixtureWorld& world, const std::string& path) {
    std::ofstream f = open_out(path);
    f << "dims " << world.dims << "\n";
    for (const auto& c : world.components) {
        f << "component " << c.class_id << " " << role_name(world.class_roles.at(c.class_id))
          << " " << format_double(c.weight);
        for (double m : c.mean) f << " " << format_double(m);
        f << " " << format_double(c.variance) << "\n";
    }
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream f = open_out(path);
    int dims = ds.train.empty() ? (ds.test.empty() ? 0 : static_cast<int>(ds.test[0].features.size()))
                                : static_cast<int>(ds.train[0].features.size());
    f << "id";
    for (int i = 0; i < dims; ++i) f << ",feature_" << i;
    f << ",role,true_class,split\n";
    auto dump = [&](const std::vector<LabeledSample>& part, const char* split) {
        for (const auto& s : part) {
            f << s.id;
            for (double v : s.features) f << "," << format_double(v);
            f << "," << role_name(s.role) << "," << s.true_class << "," << split << "\n";
        }
    };
    dump(ds.train, "train");
    dump(ds.test, "test");
}

void save_bank(const PairBank& bank, const std::string& path) {
    std::ofstream f = open_out(path);
    int dims = bank.positives.empty() ? 0 : static_cast<int>(bank.positives[0].features.size());
    f << "seed_id,prompt_class,polarity";
    for (int i = 0; i < dims; ++i) f << ",feature_" << i;
    f << "\n";
    auto dump = [&](const std::vector<GeneratedInstance>& side, const char* pol) {
        for (const auto& g : side) {
            f << g.seed_id << "," << g.prompt_class << "," << pol;
            for (double v : g.features) f << "," << format_double(v);
            f << "\n";
        }
    };
    dump(bank.positives, "positive");
    dump(bank.negatives, "negative");
}

PairBank load_bank(const std::string& path, int expected_dims) {
    std::ifstream f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty bank file");
    PairBank bank;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        GeneratedInstance g;
        std::getline(ss, field, ',');
        g.seed_id = std::stoi(field);
        std::getline(ss, field, ',');
        g.prompt_class = std::stoi(field);
        std::getline(ss, field, ',');
        bool positive = field == "positive";
        if (!positive && field != "negative") parse_fail(path, lineno, "bad polarity '" + field + "'");
        while (std::getline(ss, field, ',')) g.features.push_back(std::stod(field));
        if (static_cast<int>(g.features.size()) != expected_dims)
            parse_fail(path, lineno, "feature count does not match world dims");
        g.polarity = positive ? Polarity::positive : Polarity::negative;
        (positive ? bank.positives : bank.negatives).push_back(std::move(g));
    }
    return bank;
}

void save_checkpoint(const ClassifierModel& model, const std::string& path) {
    std::ofstream f = open_out(path);
    f << "diffpair-checkpoint v1\n";
    f << "dims " << model.dims << " hidden " << model.hidden << " known " << model.known
      << " head " << (model.head_mode == BinaryHeadMode::pair_softmax ? "pair_softmax" : "single_sigmoid")
      << "\n";
    f << "input_mean";
    for (double v : model.input_mean) f << " " << format_double(v);
    f << "\ninput_scale";
    for (double v : model.input_scale) f << " " << format_double(v);
    f << "\n";
    auto ts = model.tensors();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        f << "tensor " << ClassifierModel::tensor_name(i) << " " << ts[i]->size() << "\n";
        for (std::size_t j = 0; j < ts[i]->size(); ++j)
            f << format_double((*ts[i])[j]) << ((j + 1) % 8 == 0 || j + 1 == ts[i]->size() ? "\n" : " ");
    }
}

ClassifierModel load_checkpoint(const std::string& path) {
    std::ifstream f = open_in(path);
    std::string magic;
    std::getline(f, magic);
    if (magic != "diffpair-checkpoint v1")
        throw std::runtime_error(path + ": not a diffpair checkpoint");
    ClassifierModel m;
    std::string key, head;
    f >> key >> m.dims >> key >> m.hidden >> key >> m.known >> key >> head;
    m.head_mode = head == "single_sigmoid" ? BinaryHeadMode::single_sigmoid
                                           : BinaryHeadMode::pair_softmax;
    m.input_mean.resize(static_cast<std::size_t>(m.dims));
    m.input_scale.resize(static_cast<std::size_t>(m.dims));
    f >> key;
    for (auto& v : m.input_mean) f >> v;
    f >> key;
    for (auto& v : m.input_scale) f >> v;
    auto ts = m.tensors();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::string name;
        std::size_t n = 0;
        f >> key >> name >> n;
        if (key != "tensor" || name != ClassifierModel::tensor_name(i))
            throw std::runtime_error(path + ": unexpected tensor '" + name + "'");
        ts[i]->resize(n);
        for (auto& v : *ts[i]) f >> v;
    }
    if (!f) throw std::runtime_error(path + ": truncated checkpoint");
    return m;
}

}  // namespace diffpair
