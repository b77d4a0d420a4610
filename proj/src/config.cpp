#include "lowswitch/config.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "lowswitch/agents.hpp"
#include "lowswitch/criteria.hpp"
#include "lowswitch/envs.hpp"

namespace lowswitch::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_long(const std::string& s, long& out) {
    try {
        std::size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

core::CriterionConfig parse_criterion(const std::string& token) {
    core::CriterionConfig config;
    const auto colon = token.find(':');
    config.id = trim(token.substr(0, colon));
    const auto& ids = criteria::criterion_ids();
    if (std::find(ids.begin(), ids.end(), config.id) == ids.end())
        throw std::invalid_argument("unknown criterion id '" + config.id +
                                    "' (valid: " + join(ids) + ")");
    if (colon == std::string::npos) return config;
    for (const std::string& kv : split(token.substr(colon + 1), ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("criterion parameter '" + kv + "' is not key=value");
        const std::string key = trim(kv.substr(0, eq));
        double value;
        if (!parse_double(trim(kv.substr(eq + 1)), value))
            throw std::invalid_argument("criterion parameter '" + key + "' is not numeric");
        config.params[key] = value;
    }
    return config;
}

std::string criterion_label(const core::CriterionConfig& config) {
    std::string label = config.id;
    for (const auto& [key, value] : config.params)
        label += "_" + key + format_param(value);
    return label;
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    ExperimentSpec spec;
    auto& errors = result.errors;

    std::string section;
    std::istringstream lines(text);
    std::string raw;
    int line_no = 0;
    bool have_criteria = false;

    while (std::getline(lines, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section != "run" && section != "criteria" && section != "output")
                errors.push_back("line " + std::to_string(line_no) + ": unknown section [" +
                                 section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto bad_number = [&errors, line_no, &key] {
            errors.push_back("line " + std::to_string(line_no) + ": malformed numeric for '" +
                             key + "'");
        };

        if (section == "run") {
            long l;
            double d;
            if (key == "env") {
                spec.base.env_id = value;
            } else if (key == "agent") {
                spec.base.agent_id = value;
            } else if (key == "steps") {
                parse_long(value, l) ? void(spec.base.total_steps = l) : bad_number();
            } else if (key == "warmup") {
                parse_long(value, l) ? void(spec.base.warmup_steps = l) : bad_number();
            } else if (key == "update_period") {
                parse_long(value, l) ? void(spec.base.update_period = l) : bad_number();
            } else if (key == "batch_size") {
                parse_long(value, l) ? void(spec.base.batch_size = l) : bad_number();
            } else if (key == "buffer_capacity") {
                parse_long(value, l) ? void(spec.base.buffer_capacity = l) : bad_number();
            } else if (key == "gamma") {
                parse_double(value, d) ? void(spec.base.gamma = d) : bad_number();
            } else if (key == "bonus") {
                parse_double(value, d) ? void(spec.base.bonus_beta = d) : bad_number();
            } else if (key == "seeds") {
                spec.seeds.clear();
                for (const std::string& s : split(value, ',')) {
                    long seed;
                    if (!parse_long(s, seed) || seed < 0) {
                        bad_number();
                        break;
                    }
                    spec.seeds.push_back(static_cast<std::uint64_t>(seed));
                }
            } else {
                errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key +
                                 "' in [run]");
            }
        } else if (section == "criteria") {
            if (key == "list") {
                have_criteria = true;
                for (const std::string& token : split(value, ',')) {
                    try {
                        spec.criteria.push_back(parse_criterion(token));
                    } catch (const std::invalid_argument& e) {
                        errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
                    }
                }
            } else {
                errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key +
                                 "' in [criteria]");
            }
        } else if (section == "output") {
            long l;
            double d;
            if (key == "dir") {
                spec.output_dir = value;
            } else if (key == "jobs") {
                parse_long(value, l) ? void(spec.jobs = static_cast<int>(l)) : bad_number();
            } else if (key == "rsi") {
                if (value == "true" || value == "1")
                    spec.rsi = true;
                else if (value == "false" || value == "0")
                    spec.rsi = false;
                else
                    errors.push_back("line " + std::to_string(line_no) +
                                     ": rsi must be true or false");
            } else if (key == "sigma_rsi") {
                parse_double(value, d) ? void(spec.sigma_rsi = d) : bad_number();
            } else {
                errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key +
                                 "' in [output]");
            }
        } else {
            errors.push_back("line " + std::to_string(line_no) + ": key outside any section");
        }
    }

    const auto& env_ids = envs::environment_ids();
    if (std::find(env_ids.begin(), env_ids.end(), spec.base.env_id) == env_ids.end())
        errors.push_back("unknown environment id '" + spec.base.env_id +
                         "' (valid: " + join(env_ids) + ")");
    const auto& ids = agents::agent_ids();
    if (std::find(ids.begin(), ids.end(), spec.base.agent_id) == ids.end())
        errors.push_back("unknown agent id '" + spec.base.agent_id + "' (valid: " + join(ids) +
                         ")");
    if (spec.seeds.empty()) errors.push_back("seed list must be nonempty");
    std::set<std::uint64_t> unique_seeds(spec.seeds.begin(), spec.seeds.end());
    if (unique_seeds.size() != spec.seeds.size()) errors.push_back("duplicate seeds in seed list");
    if (!have_criteria || spec.criteria.empty()) errors.push_back("no criteria listed");
    if (spec.rsi) {
        bool has_none = false;
        for (const auto& c : spec.criteria) has_none |= c.id == "none";
        if (!has_none)
            errors.push_back("RSI requested but the 'none' baseline is not in the criteria list");
    }
    if (spec.jobs < 1) errors.push_back("jobs must be >= 1");
    try {
        if (errors.empty()) spec.base.validate();
    } catch (const std::invalid_argument& e) {
        errors.push_back(e.what());
    }

    if (errors.empty()) result.spec = std::move(spec);
    return result;
}

}  // namespace lowswitch::cli
