#include "slogic/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "slogic/util.hpp"

namespace slogic {

double wilson_lower(double p, std::int64_t n, double z) {
    if (n <= 0 || p <= 0.0) return 0.0;
    const double nn = static_cast<double>(n);
    const double z2 = z * z;
    const double center = p + z2 / (2.0 * nn);
    const double spread = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    const double w = (center - spread) / (1.0 + z2 / nn);
    return std::max(0.0, w);
}

bool rule_index_less(const Rule& ra, const RuleStats& sa, const Rule& rb, const RuleStats& sb) {
    if (sa.wilson != sb.wilson) return sa.wilson > sb.wilson;
    if (sa.support != sb.support) return sa.support > sb.support;
    if (ra.body.size() != rb.body.size()) return ra.body.size() < rb.body.size();
    return ra.body < rb.body;
}

RuleBase::RuleBase(std::vector<std::pair<Rule, RuleStats>> rules, int num_relations_aug) : rules_(std::move(rules)) {
    index_.resize(static_cast<std::size_t>(num_relations_aug));
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& [rule, stats] = rules_[i];
        (void)stats;
        index_.at(static_cast<std::size_t>(rule.head)).push_back(static_cast<std::int32_t>(i));
        if (!lookup_.emplace(rule, static_cast<std::int32_t>(i)).second) {
            throw std::runtime_error("duplicate (head, body) pair in rule base");
        }
    }
    for (auto& ids : index_) {
        std::sort(ids.begin(), ids.end(), [&](std::int32_t a, std::int32_t b) {
            const auto& [ra, sa] = rules_[static_cast<std::size_t>(a)];
            const auto& [rb, sb] = rules_[static_cast<std::size_t>(b)];
            return rule_index_less(ra, sa, rb, sb);
        });
    }
}

void RuleBase::save_tsv(const std::string& path, const Vocabulary& vocab) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw UserError("cannot write rule base: " + path);
    char buf[160];
    for (const auto& [rule, s] : rules_) {
        out << vocab.relation_name(rule.head) << '\t';
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (i) out << ',';
            out << vocab.relation_name(rule.body[i]);
        }
        out << '\t' << s.support << '\t' << s.body_count;
        std::snprintf(buf, sizeof(buf), "\t%.17g\t%.17g\t%.17g\t%.17g", s.confidence, s.laplace, s.wilson, s.z);
        out << buf << '\n';
    }
}

RuleBase RuleBase::load_tsv(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open rule base: " + path);
    std::vector<std::pair<Rule, RuleStats>> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string head_name, body_names, field;
        if (!std::getline(ss, head_name, '\t') || !std::getline(ss, body_names, '\t')) {
            throw UserError(path + ":" + std::to_string(line_no) + ": malformed rule record");
        }
        Rule rule;
        auto head = vocab.parse_relation(head_name);
        if (!head) throw UserError(path + ":" + std::to_string(line_no) + ": unknown relation '" + head_name + "'");
        rule.head = *head;
        std::stringstream bs(body_names);
        std::string part;
        while (std::getline(bs, part, ',')) {
            auto rel = vocab.parse_relation(part);
            if (!rel) throw UserError(path + ":" + std::to_string(line_no) + ": unknown relation '" + part + "'");
            rule.body.push_back(*rel);
        }
        if (rule.body.empty()) throw UserError(path + ":" + std::to_string(line_no) + ": empty rule body");
        RuleStats s;
        try {
            std::getline(ss, field, '\t');
            s.support = std::stoll(field);
            std::getline(ss, field, '\t');
            s.body_count = std::stoll(field);
            std::getline(ss, field, '\t');
            s.confidence = std::stod(field);
            std::getline(ss, field, '\t');
            s.laplace = std::stod(field);
            std::getline(ss, field, '\t');
            s.wilson = std::stod(field);
            std::getline(ss, field, '\t');
            s.z = std::stod(field);
        } catch (const std::exception&) {
            throw UserError(path + ":" + std::to_string(line_no) + ": malformed rule statistics");
        }
        rules.emplace_back(std::move(rule), s);
    }
    return RuleBase(std::move(rules), static_cast<int>(2 * vocab.num_relations()));
}

}  // namespace slogic
