#include "har/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace har {

namespace {

const std::map<std::string, CombineRule>& rule_names() {
    static const std::map<std::string, CombineRule> names{
        {"plurality", CombineRule::Plurality}, {"majority", CombineRule::Majority},
        {"unanimous", CombineRule::Unanimous}, {"sum", CombineRule::Sum},
        {"product", CombineRule::Product},     {"min", CombineRule::Min},
        {"max", CombineRule::Max},             {"median", CombineRule::Median}};
    return names;
}

std::optional<VoteRule> as_vote_rule(CombineRule r) {
    switch (r) {
        case CombineRule::Plurality: return VoteRule::Plurality;
        case CombineRule::Majority: return VoteRule::Majority;
        case CombineRule::Unanimous: return VoteRule::Unanimous;
        default: return std::nullopt;
    }
}

SoftRule as_soft_rule(CombineRule r) {
    switch (r) {
        case CombineRule::Sum: return SoftRule::Sum;
        case CombineRule::Product: return SoftRule::Product;
        case CombineRule::Min: return SoftRule::Min;
        case CombineRule::Max: return SoftRule::Max;
        case CombineRule::Median: return SoftRule::Median;
        default: throw Error("not a probability rule");
    }
}

double median_of(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string to_string(CombineRule rule) {
    for (const auto& [name, r] : rule_names()) {
        if (r == rule) return name;
    }
    return "?";
}

CombineRule combine_rule_from_string(const std::string& name) {
    auto it = rule_names().find(name);
    if (it == rule_names().end()) {
        throw Error("unknown combine rule '" + name +
                    "' (expected plurality, majority, unanimous, sum, product, min, max, median)");
    }
    return it->second;
}

std::string to_string(TieBreak tiebreak) {
    switch (tiebreak) {
        case TieBreak::SoftSum: return "soft_sum";
        case TieBreak::LowestCode: return "lowest_code";
        case TieBreak::Abstain: return "abstain";
    }
    return "?";
}

TieBreak tiebreak_from_string(const std::string& name) {
    if (name == "soft_sum") return TieBreak::SoftSum;
    if (name == "lowest_code") return TieBreak::LowestCode;
    if (name == "abstain") return TieBreak::Abstain;
    throw Error("unknown tiebreak '" + name + "' (expected soft_sum, lowest_code, abstain)");
}

std::optional<int> hard_vote(std::span<const int> labels, VoteRule rule, TieBreak tiebreak) {
    if (labels.empty()) throw Error("hard_vote: no votes");
    std::map<int, std::size_t> counts;
    for (int l : labels) ++counts[l];

    switch (rule) {
        case VoteRule::Unanimous:
            return counts.size() == 1 ? std::optional<int>(labels.front()) : std::nullopt;
        case VoteRule::Majority:
            for (const auto& [label, n] : counts) {
                if (2 * n > labels.size()) return label;
            }
            return std::nullopt;
        case VoteRule::Plurality: {
            std::size_t top = 0;
            for (const auto& [label, n] : counts) top = std::max(top, n);
            std::vector<int> tied;
            for (const auto& [label, n] : counts) {
                if (n == top) tied.push_back(label);
            }
            if (tied.size() == 1) return tied.front();
            if (tiebreak == TieBreak::Abstain) return std::nullopt;
            return tied.front();  // map order: lowest code
        }
    }
    return std::nullopt;
}

SoftVoteResult soft_vote(const std::vector<std::vector<double>>& distributions, SoftRule rule) {
    if (distributions.empty()) throw Error("soft_vote: no distributions");
    const std::size_t C = distributions.front().size();
    for (const auto& d : distributions) {
        if (d.size() != C) {
            throw Error("soft_vote: class arity mismatch (" + std::to_string(d.size()) + " vs " + std::to_string(C) + ")");
        }
    }
    SoftVoteResult out;
    out.scores.resize(C);
    std::vector<double> column(distributions.size());
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t m = 0; m < distributions.size(); ++m) column[m] = distributions[m][c];
        double s = 0.0;
        switch (rule) {
            case SoftRule::Sum:
                for (double v : column) s += v;
                break;
            case SoftRule::Product:
                s = 1.0;
                for (double v : column) s *= v;
                break;
            case SoftRule::Min: s = *std::min_element(column.begin(), column.end()); break;
            case SoftRule::Max: s = *std::max_element(column.begin(), column.end()); break;
            case SoftRule::Median: s = median_of(column); break;
        }
        out.scores[c] = s;
    }
    out.label = argmax(out.scores);
    return out;
}

EnsembleSpec EnsembleSpec::proposed() {
    EnsembleSpec s;
    for (auto k : {ClassifierKind::LogReg, ClassifierKind::Mlp, ClassifierKind::Knn, ClassifierKind::LinearSvm,
                   ClassifierKind::RandomForest}) {
        s.members.push_back(ClassifierSpec::defaults(k));
    }
    return s;
}

EnsembleSpec EnsembleSpec::catal() {
    EnsembleSpec s;
    for (auto k : {ClassifierKind::Cart, ClassifierKind::LogReg, ClassifierKind::Mlp}) {
        s.members.push_back(ClassifierSpec::defaults(k));
    }
    return s;
}

EnsembleSpec EnsembleSpec::preset(const std::string& name) {
    if (name == "proposed") return proposed();
    if (name == "catal") return catal();
    throw Error("unknown ensemble preset '" + name + "' (expected proposed or catal)");
}

void EnsembleSpec::validate(bool allow_single_member) const {
    if (members.empty() || (members.size() < 2 && !allow_single_member)) {
        throw Error("an ensemble needs at least 2 members, got " + std::to_string(members.size()));
    }
    for (const auto& m : members) m.validate();
}

EnsembleModel::EnsembleModel(EnsembleSpec spec, std::vector<std::unique_ptr<Classifier>> members)
    : spec_(std::move(spec)), members_(std::move(members)) {
    if (members_.size() != spec_.members.size()) throw Error("ensemble member count does not match its spec");
    if (members_.empty()) throw Error("ensemble without members");
    classes_ = members_.front()->classes();
    for (const auto& m : members_) {
        if (m->classes() != classes_) throw Error("ensemble members disagree on the class list");
    }
}

std::optional<int> EnsembleModel::predict(std::span<const double> x) const {
    std::vector<int> ignored;
    return predict(x, ignored);
}

std::optional<int> EnsembleModel::predict(std::span<const double> x, std::vector<int>& member_labels) const {
    std::vector<std::vector<double>> dists;
    dists.reserve(members_.size());
    member_labels.clear();
    for (const auto& m : members_) {
        dists.push_back(m->predict_proba(x));
        member_labels.push_back(classes_[argmax(dists.back())]);
    }

    const auto vote_rule = as_vote_rule(spec_.rule);
    if (!vote_rule) return classes_[soft_vote(dists, as_soft_rule(spec_.rule)).label];

    // Plurality ties are resolved among the tied labels; failed majority/unanimity among all.
    if (auto winner = hard_vote(member_labels, *vote_rule, TieBreak::Abstain)) return winner;
    std::vector<bool> candidate(classes_.size(), true);
    if (*vote_rule == VoteRule::Plurality) {
        std::vector<std::size_t> counts(classes_.size(), 0);
        for (int l : member_labels) {
            ++counts[static_cast<std::size_t>(std::lower_bound(classes_.begin(), classes_.end(), l) - classes_.begin())];
        }
        const std::size_t top = *std::max_element(counts.begin(), counts.end());
        for (std::size_t c = 0; c < counts.size(); ++c) candidate[c] = counts[c] == top;
    }
    switch (spec_.tiebreak) {
        case TieBreak::Abstain: return std::nullopt;
        case TieBreak::LowestCode:
            for (std::size_t c = 0; c < classes_.size(); ++c) {
                if (candidate[c]) return classes_[c];
            }
            break;
        case TieBreak::SoftSum: {
            const auto sum = soft_vote(dists, SoftRule::Sum).scores;
            std::size_t best = classes_.size();
            for (std::size_t c = 0; c < classes_.size(); ++c) {
                if (candidate[c] && (best == classes_.size() || sum[c] > sum[best])) best = c;
            }
            return classes_[best];
        }
    }
    return classes_.front();
}

EnsembleModel fit_ensemble(const EnsembleSpec& spec, const TrainingSet& ts, bool allow_single_member) {
    spec.validate(allow_single_member);
    std::vector<std::unique_ptr<Classifier>> members;
    for (std::size_t i = 0; i < spec.members.size(); ++i) {
        try {
            members.push_back(train(spec.members[i], ts));
        } catch (const std::exception& e) {
            throw Error("ensemble member " + std::to_string(i) + " (" + to_string(spec.members[i].kind()) +
                        "): " + e.what());
        }
    }
    return EnsembleModel(spec, std::move(members));
}

std::optional<int> predict_ensemble(const EnsembleModel& model, std::span<const double> x) {
    return model.predict(x);
}

}  // namespace har
