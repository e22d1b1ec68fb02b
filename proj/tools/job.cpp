#include "job.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "expr.hpp"
#include "tscalc/errors.hpp"

namespace tscalc::cli {

namespace {

double parse_double(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError("malformed number '" + text + "' for " + what, 0);
    return v;
}

void apply_key(JobSpec& job, const std::string& key, const std::string& value, bool overwrite) {
    auto set_str = [&](std::optional<std::string>& slot) {
        if (overwrite || !slot) slot = value;
    };
    auto set_num = [&](std::optional<double>& slot) {
        if (overwrite || !slot) slot = parse_double(value, key);
    };
    if (key == "cmd") {
        if (overwrite || job.command.empty()) job.command = value;
    } else if (key == "ts") {
        set_str(job.ts);
    } else if (key == "alpha") {
        set_num(job.alpha);
    } else if (key == "p") {
        set_str(job.p);
    } else if (key == "f") {
        set_str(job.f);
    } else if (key == "t0") {
        set_num(job.t0);
    } else if (key == "y0") {
        set_num(job.y0);
    } else if (key == "targets") {
        set_str(job.targets);
    } else if (key == "tol") {
        set_num(job.tol);
    } else if (key == "out") {
        set_str(job.out);
    } else {
        throw ParseError("unknown job key '" + key + "'", 0);
    }
}

void merge_job_file(JobSpec& job, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open job file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = 0, e = line.size();
        while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
        if (b == e) continue;
        const std::string trimmed = line.substr(b, e - b);
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ParseError("job file line is not key=value: '" + trimmed + "'", 0);
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        std::size_t vb = 0;
        while (vb < value.size() && std::isspace(static_cast<unsigned char>(value[vb]))) ++vb;
        value.erase(0, vb);
        apply_key(job, key, value, /*overwrite=*/false); // flags already present win
    }
}

} // namespace

JobSpec parse_command_line(const std::vector<std::string>& args) {
    JobSpec job;
    std::optional<std::string> job_file;

    std::size_t i = 0;
    if (i < args.size() && !args[i].starts_with("--")) {
        job.command = args[i];
        ++i;
    }
    for (; i < args.size(); ++i) {
        const std::string& arg = args[i];
        if (!arg.starts_with("--")) throw ParseError("expected a --flag, got '" + arg + "'", 0);
        std::string key = arg.substr(2);
        std::string value;
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= args.size()) throw ParseError("flag --" + key + " needs a value", 0);
            value = args[++i];
        }
        if (key == "job")
            job_file = value;
        else
            apply_key(job, key, value, /*overwrite=*/true);
    }
    if (job_file) merge_job_file(job, *job_file);
    if (job.command.empty())
        throw ParseError("no command given; expected partition, eval-exp, solve, verify or "
                         "regress-check",
                         0);
    return job;
}

std::vector<Point> parse_targets(const TimeScale& ts, const std::string& text) {
    std::vector<Point> points;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            points.push_back(ts.at(parse_double(item, "target"), 1e-9));
            continue;
        }
        const std::string a_text = item.substr(0, dots);
        std::string b_text = item.substr(dots + 2);
        std::optional<std::int64_t> samples;
        if (const auto colon = b_text.find(':'); colon != std::string::npos) {
            samples = static_cast<std::int64_t>(
                parse_double(b_text.substr(colon + 1), "sample count"));
            if (*samples < 1) throw ParseError("sample count must be at least 1", 0);
            b_text = b_text.substr(0, colon);
        }
        const double a = parse_double(a_text, "range start");
        const double b = parse_double(b_text, "range end");
        if (samples) {
            for (std::int64_t k = 0; k <= *samples; ++k) {
                const double x =
                    a + (b - a) * static_cast<double>(k) / static_cast<double>(*samples);
                points.push_back(ts.at(x, 1e-9));
            }
            continue;
        }
        const Point from = ts.at(a, 1e-9);
        const Point to = ts.at(b, 1e-9);
        try {
            for (const Point& pt : iterate_scattered(ts, from, to)) points.push_back(pt);
        } catch (const ValidationError&) {
            throw ValidationError("range " + item +
                                  " crosses a dense stretch; use a..b:n to sample it");
        }
        points.push_back(to);
    }
    if (points.empty()) throw ValidationError("no targets given");
    return points;
}

} // namespace tscalc::cli
