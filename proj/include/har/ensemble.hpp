#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "har/classifiers.hpp"

namespace har {

enum class VoteRule { Plurality, Majority, Unanimous };
enum class SoftRule { Sum, Product, Min, Max, Median };

/// Hard voting rules and the Kittler probability rules under one name.
enum class CombineRule { Plurality, Majority, Unanimous, Sum, Product, Min, Max, Median };

/// How an ensemble resolves a plurality tie or a failed majority/unanimity.
enum class TieBreak {
    SoftSum,     // sum-rule over member distributions, then lowest class code
    LowestCode,  // lowest tied (or overall) class code
    Abstain,     // strict mode: surface the abstention
};

std::string to_string(CombineRule rule);
CombineRule combine_rule_from_string(const std::string& name);
std::string to_string(TieBreak tiebreak);
TieBreak tiebreak_from_string(const std::string& name);

/// Plurality: most frequent label. Majority: label with more than half the votes.
/// Unanimous: the common label when all agree. Returns nullopt for Abstain. A plurality
/// tie goes to the lowest tied label under TieBreak::LowestCode and abstains otherwise.
std::optional<int> hard_vote(std::span<const int> labels, VoteRule rule, TieBreak tiebreak = TieBreak::LowestCode);

struct SoftVoteResult {
    std::size_t label = 0;       // class position, ties toward the lowest
    std::vector<double> scores;  // raw combined values, not renormalised
};

SoftVoteResult soft_vote(const std::vector<std::vector<double>>& distributions, SoftRule rule);

struct EnsembleSpec {
    std::vector<ClassifierSpec> members;
    CombineRule rule = CombineRule::Plurality;
    TieBreak tiebreak = TieBreak::SoftSum;

    /// logreg, mlp, knn, linsvm, rforest.
    static EnsembleSpec proposed();
    /// cart (standing in for J48), logreg, mlp.
    static EnsembleSpec catal();
    static EnsembleSpec preset(const std::string& name);

    void validate(bool allow_single_member = false) const;
};

class EnsembleModel {
public:
    EnsembleModel(EnsembleSpec spec, std::vector<std::unique_ptr<Classifier>> members);

    const EnsembleSpec& spec() const noexcept { return spec_; }
    const std::vector<int>& classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return members_.size(); }
    const Classifier& member(std::size_t i) const { return *members_.at(i); }

    /// Combined label; nullopt only when the tiebreak policy is Abstain.
    std::optional<int> predict(std::span<const double> x) const;

    /// As predict, also reporting each member's own label.
    std::optional<int> predict(std::span<const double> x, std::vector<int>& member_labels) const;

private:
    EnsembleSpec spec_;
    std::vector<std::unique_ptr<Classifier>> members_;
    std::vector<int> classes_;
};

/// Fits every member independently on `ts`. A member failure is rethrown naming the member.
EnsembleModel fit_ensemble(const EnsembleSpec& spec, const TrainingSet& ts, bool allow_single_member = false);

std::optional<int> predict_ensemble(const EnsembleModel& model, std::span<const double> x);

}  // namespace har
