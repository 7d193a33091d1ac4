#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "wpt/util/format.hpp"

namespace wpt::verify {

struct Sample {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// One estimate evaluated over a batch. pass <=> worst ratio <= bound (and at
/// least one sample was accepted).
struct EstimateReport {
    std::string name;
    std::vector<Sample> samples;
    double worst = -std::numeric_limits<double>::infinity();
    double bound = std::numeric_limits<double>::infinity();
    bool pass = false;
    std::vector<std::string> notes;

    void add(Sample s) { samples.push_back(std::move(s)); }

    EstimateReport& finalize() {
        worst = -std::numeric_limits<double>::infinity();
        for (const auto& s : samples) worst = std::isnan(s.ratio) ? std::numeric_limits<double>::infinity() : std::max(worst, s.ratio);
        pass = !samples.empty() && worst <= bound;
        return *this;
    }

    std::string csv() const {
        std::ostringstream o;
        o << "id,lhs,rhs,ratio\n";
        for (const auto& s : samples) o << s.id << ',' << fmt17(s.lhs) << ',' << fmt17(s.rhs) << ',' << fmt17(s.ratio) << '\n';
        return o.str();
    }

    std::string summary() const {
        std::ostringstream o;
        o << name << ": " << (pass ? "PASS" : "FAIL") << " worst=" << fmt17(worst) << " bound=" << fmt17(bound)
          << " samples=" << samples.size() << '\n';
        for (const auto& n : notes) o << "  note: " << n << '\n';
        return o.str();
    }
};

/// Pass/fail tally of a named property over many trials.
struct CheckRow {
    std::string name;
    long trials = 0;
    long violations = 0;
    double worst_excess = 0.0;  // largest amount by which the property failed (0 if never)

    void record(double excess, double tol) {
        ++trials;
        if (std::isnan(excess) || excess > tol) {
            ++violations;
            worst_excess = std::isnan(excess) ? std::numeric_limits<double>::infinity() : std::max(worst_excess, excess);
        }
    }
    bool pass() const { return violations == 0 && trials > 0; }
};

struct CheckReport {
    std::string name;
    std::vector<CheckRow> rows;

    CheckRow& row(const std::string& n) {
        for (auto& r : rows)
            if (r.name == n) return r;
        rows.push_back({n});
        return rows.back();
    }
    bool pass() const {
        return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass(); });
    }

    std::string csv() const {
        std::ostringstream o;
        o << "check,trials,violations,worst_excess\n";
        for (const auto& r : rows) o << r.name << ',' << r.trials << ',' << r.violations << ',' << fmt17(r.worst_excess) << '\n';
        return o.str();
    }
    std::string summary() const {
        std::ostringstream o;
        o << name << ": " << (pass() ? "PASS" : "FAIL") << " checks=" << rows.size() << '\n';
        for (const auto& r : rows)
            if (!r.pass()) o << "  failed: " << r.name << " (" << r.violations << '/' << r.trials << ")\n";
        return o.str();
    }
};

}  // namespace wpt::verify
