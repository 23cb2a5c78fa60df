/*
 * Copyright 2026 The cdma-jic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cdma/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdma {

std::string_view to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::convergence:
        return "convergence";
    case ExperimentKind::channel_mse:
        return "channel-mse";
    case ExperimentKind::sweep_ebn0:
        return "sweep-ebn0";
    case ExperimentKind::sweep_users:
        return "sweep-users";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name)
{
    for (auto k : {ExperimentKind::convergence, ExperimentKind::channel_mse, ExperimentKind::sweep_ebn0,
                   ExperimentKind::sweep_users}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::map<ReceiverKind, StepGrid> ExperimentConfig::default_grids()
{
    const std::vector<double> mu_w{0.01, 0.02, 0.04};
    const std::vector<double> mu_lambda{0.001, 0.003, 0.01};
    const std::vector<double> mu_h{0.002, 0.005, 0.01};
    std::map<ReceiverKind, StepGrid> g;
    for (auto k : {ReceiverKind::linear, ReceiverKind::sic, ReceiverKind::pic, ReceiverKind::jo_sic,
                   ReceiverKind::jo_pic}) {
        g[k] = {mu_w, is_joint(k) ? mu_lambda : std::vector<double>{mu_lambda.front()}, mu_h};
    }
    return g;
}

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (n < 1) fail("n must be positive");
    if (lp < 1 || lp > n) fail("lp must satisfy 1 <= lp <= n");
    if (k_users < 1) fail("k_users must be positive");
    if (ebn0_db.empty()) fail("ebn0_db must list at least one value");
    if (packet_len < 2) fail("packet_len must be at least 2");
    if (training_len < 0 || training_len >= packet_len) fail("training_len must be in [0, packet_len)");
    if (trials < 1 || full_scale_trials < 1) fail("trials must be positive");
    if (receivers.empty()) fail("receivers must list at least one receiver");
    if (pic_stages < 1) fail("pic_stages must be positive");
    if (pilot_trials < 1) fail("pilot_trials must be positive");
    if (power_std_db < 0.0) fail("power_std_db must be non-negative");
    if (nonzero_paths < 1 || max_spacing < 1 || (nonzero_paths - 1) * max_spacing + 1 > lp) {
        fail("nonzero_paths and max_spacing do not fit in lp taps");
    }
    if (!(amplitude_smoothing > 0.0 && amplitude_smoothing <= 1.0)) fail("amplitude_smoothing must be in (0, 1]");
    if (mse_window < 1 || mse_window > packet_len) fail("mse_window must be in [1, packet_len]");
    if (threads < 0) fail("threads must be non-negative");
    for (auto r : receivers) {
        auto it = grids.find(r);
        if (it == grids.end()) fail("no step-size grid for receiver " + std::string(to_string(r)));
        const auto& g = it->second;
        for (const auto* list : {&g.mu_w, &g.mu_lambda, &g.mu_h}) {
            if (list->empty()) fail("empty step-size list for receiver " + std::string(to_string(r)));
            for (double mu : *list) {
                if (!(mu >= 0.0) || !std::isfinite(mu)) fail("step sizes must be finite and non-negative");
            }
        }
    }
    if (experiment == ExperimentKind::sweep_users) {
        if (users_sweep.empty()) fail("users_sweep must list at least one K");
        for (int k : users_sweep) {
            if (k < 1) fail("users_sweep entries must be positive");
        }
    }
    if (experiment != ExperimentKind::sweep_ebn0 && ebn0_db.size() != 1) {
        fail("ebn0_db must be a single value unless experiment = sweep-ebn0");
    }
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = trim(item);
        if (t.empty()) {
            throw ConfigError("empty list element in '" + v + "'");
        }
        out.push_back(std::move(t));
    }
    if (out.empty()) {
        throw ConfigError("empty list");
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v)
{
    T out{};
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const auto& s : split_list(v)) {
        out.push_back(parse_number<double>(key, s));
    }
    return out;
}

std::vector<double> sorted_unique(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

void set_top_level(ExperimentConfig& c, const std::string& key, const std::string& v)
{
    if (key == "n") c.n = parse_number<int>(key, v);
    else if (key == "lp") c.lp = parse_number<int>(key, v);
    else if (key == "k_users") c.k_users = parse_number<int>(key, v);
    else if (key == "ebn0_db") c.ebn0_db = parse_doubles(key, v);
    else if (key == "users_sweep") {
        c.users_sweep.clear();
        for (const auto& s : split_list(v)) c.users_sweep.push_back(parse_number<int>(key, s));
    }
    else if (key == "packet_len") c.packet_len = parse_number<long>(key, v);
    else if (key == "training_len") c.training_len = parse_number<long>(key, v);
    else if (key == "trials") c.trials = parse_number<int>(key, v);
    else if (key == "full_scale_trials") c.full_scale_trials = parse_number<int>(key, v);
    else if (key == "receivers") {
        c.receivers.clear();
        for (const auto& s : split_list(v)) {
            auto r = parse_receiver(s);
            if (!r) throw ConfigError("unknown receiver '" + s + "'");
            if (std::find(c.receivers.begin(), c.receivers.end(), *r) != c.receivers.end()) {
                throw ConfigError("receiver listed twice: '" + s + "'");
            }
            c.receivers.push_back(*r);
        }
    }
    else if (key == "pic_stages") c.pic_stages = parse_number<int>(key, v);
    else if (key == "master_seed") c.master_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "experiment") {
        auto e = parse_experiment(v);
        if (!e) throw ConfigError("unknown experiment '" + v + "'");
        c.experiment = *e;
    }
    else if (key == "pilot_trials") c.pilot_trials = parse_number<int>(key, v);
    else if (key == "power_std_db") c.power_std_db = parse_number<double>(key, v);
    else if (key == "nonzero_paths") c.nonzero_paths = parse_number<int>(key, v);
    else if (key == "max_spacing") c.max_spacing = parse_number<int>(key, v);
    else if (key == "first_path") {
        if (v == "pinned") c.first_path = FirstPath::pinned;
        else if (v == "random") c.first_path = FirstPath::random;
        else throw ConfigError("first_path must be 'pinned' or 'random'");
    }
    else if (key == "fixed_codes") c.fixed_codes = parse_bool(key, v);
    else if (key == "adapt_ic_in_dd") c.adapt_ic_in_dd = parse_bool(key, v);
    else if (key == "amplitude_smoothing") c.amplitude_smoothing = parse_number<double>(key, v);
    else if (key == "mse_window") c.mse_window = parse_number<long>(key, v);
    else if (key == "threads") c.threads = parse_number<int>(key, v);
    else throw ConfigError("unknown key '" + key + "'");
}

void set_grid(StepGrid& g, const std::string& section, const std::string& key, const std::string& v)
{
    if (key == "mu_w") g.mu_w = sorted_unique(parse_doubles(key, v));
    else if (key == "mu_lambda") g.mu_lambda = sorted_unique(parse_doubles(key, v));
    else if (key == "mu_h") g.mu_h = sorted_unique(parse_doubles(key, v));
    else throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        out += (i ? ", " : "");
        out += buf;
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig c;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) {
            continue;
        }
        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError("unterminated section header");
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                if (!parse_receiver(section)) throw ConfigError("unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
            const std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key.empty() || value.empty()) throw ConfigError("empty key or value");
            if (section.empty()) {
                set_top_level(c, key, value);
            } else {
                set_grid(c.grids[*parse_receiver(section)], section, key, value);
            }
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& c)
{
    std::ostringstream o;
    auto ints = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
        return s;
    };
    std::string recv;
    for (std::size_t i = 0; i < c.receivers.size(); ++i) {
        recv += (i ? ", " : "") + std::string(to_string(c.receivers[i]));
    }
    char buf[32];
    o << "experiment = " << to_string(c.experiment) << '\n'
      << "n = " << c.n << '\n'
      << "lp = " << c.lp << '\n'
      << "k_users = " << c.k_users << '\n'
      << "ebn0_db = " << join(c.ebn0_db) << '\n'
      << "users_sweep = " << ints(c.users_sweep) << '\n'
      << "packet_len = " << c.packet_len << '\n'
      << "training_len = " << c.training_len << '\n'
      << "trials = " << c.trials << '\n'
      << "full_scale_trials = " << c.full_scale_trials << '\n'
      << "receivers = " << recv << '\n'
      << "pic_stages = " << c.pic_stages << '\n'
      << "master_seed = " << c.master_seed << '\n'
      << "pilot_trials = " << c.pilot_trials << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", c.power_std_db);
    o << "power_std_db = " << buf << '\n'
      << "nonzero_paths = " << c.nonzero_paths << '\n'
      << "max_spacing = " << c.max_spacing << '\n'
      << "first_path = " << (c.first_path == FirstPath::pinned ? "pinned" : "random") << '\n'
      << "fixed_codes = " << (c.fixed_codes ? "true" : "false") << '\n'
      << "adapt_ic_in_dd = " << (c.adapt_ic_in_dd ? "true" : "false") << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", c.amplitude_smoothing);
    o << "amplitude_smoothing = " << buf << '\n'
      << "mse_window = " << c.mse_window << '\n'
      << "threads = " << c.threads << '\n';
    for (const auto& [kind, g] : c.grids) {
        o << "\n[" << to_string(kind) << "]\n"
          << "mu_w = " << join(g.mu_w) << '\n'
          << "mu_lambda = " << join(g.mu_lambda) << '\n'
          << "mu_h = " << join(g.mu_h) << '\n';
    }
    return o.str();
}

}  // namespace cdma
