#include "soundmdp/mdp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace soundmdp {

StateSet StateSet::of(std::size_t size, std::initializer_list<StateId> members) {
    StateSet set(size);
    for (StateId s : members) set.insert(s);
    return set;
}

std::size_t StateSet::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

StateSet StateSet::complement() const {
    StateSet result(size());
    for (std::size_t i = 0; i < size(); ++i) result.bits_[i] = !bits_[i];
    return result;
}

StateSet StateSet::operator|(const StateSet& other) const {
    if (other.size() != size()) throw std::invalid_argument("state set size mismatch");
    StateSet result(size());
    for (std::size_t i = 0; i < size(); ++i) result.bits_[i] = bits_[i] || other.bits_[i];
    return result;
}

StateSet StateSet::operator&(const StateSet& other) const {
    if (other.size() != size()) throw std::invalid_argument("state set size mismatch");
    StateSet result(size());
    for (std::size_t i = 0; i < size(); ++i) result.bits_[i] = bits_[i] && other.bits_[i];
    return result;
}

std::vector<StateId> StateSet::members() const {
    std::vector<StateId> result;
    for (std::size_t i = 0; i < size(); ++i)
        if (bits_[i]) result.push_back(static_cast<StateId>(i));
    return result;
}

MdpBuilder::MdpBuilder() {
    model_.state_offsets_.push_back(0);
    model_.branch_offsets_.push_back(0);
}

StateId MdpBuilder::add_state() {
    model_.state_offsets_.push_back(model_.state_offsets_.back());
    return static_cast<StateId>(model_.num_states() - 1);
}

void MdpBuilder::add_transition(std::optional<std::string> label) {
    if (model_.num_states() == 0) throw std::logic_error("add_transition before add_state");
    model_.labels_.push_back(std::move(label));
    model_.branch_offsets_.push_back(model_.branch_offsets_.back());
    ++model_.state_offsets_.back();
}

void MdpBuilder::add_branch(double probability, double reward, StateId target) {
    const StateId last = static_cast<StateId>(model_.num_states() - 1);
    if (model_.num_states() == 0 || model_.num_transitions(last) == 0)
        throw std::logic_error("add_branch before add_transition");
    model_.branches_.push_back({probability, reward, target});
    ++model_.branch_offsets_.back();
}

StateId MdpBuilder::copy_state(const Mdp& source, StateId s) {
    const StateId id = add_state();
    for (TransitionIndex t : source.transitions(s)) {
        add_transition(source.label(t));
        for (const Branch& b : source.branches(t)) add_branch(b.probability, b.reward, b.target);
    }
    return id;
}

Mdp MdpBuilder::build() && { return std::move(model_); }

bool is_probability(PropertyKind kind) {
    return kind == PropertyKind::pmax || kind == PropertyKind::pmin;
}

Optimization optimization_of(PropertyKind kind) {
    return kind == PropertyKind::pmax || kind == PropertyKind::emax ? Optimization::max : Optimization::min;
}

std::string to_string(PropertyKind kind) {
    switch (kind) {
        case PropertyKind::pmax: return "pmax";
        case PropertyKind::pmin: return "pmin";
        case PropertyKind::emax: return "emax";
        case PropertyKind::emin: return "emin";
    }
    return "?";
}

std::optional<PropertyKind> parse_property_kind(std::string_view text) {
    if (text == "pmax") return PropertyKind::pmax;
    if (text == "pmin") return PropertyKind::pmin;
    if (text == "emax") return PropertyKind::emax;
    if (text == "emin") return PropertyKind::emin;
    return std::nullopt;
}

std::string to_string(WidthMode mode) { return mode == WidthMode::relative ? "relative" : "absolute"; }

bool ValueVector::precedes(const ValueVector& other) const {
    if (other.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!(values_[i] <= other.values_[i])) return false;
    return true;
}

bool ValueVector::has_nan() const {
    return std::any_of(values_.begin(), values_.end(), [](double x) { return std::isnan(x); });
}

namespace {

std::string shortest(double x) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
    return ec == std::errc{} ? std::string(buffer, end) : std::string("?");
}

bool is_absorbing(const Mdp& model, StateId s) {
    if (model.num_transitions(s) != 1) return false;
    const auto branches = model.branches(model.first_transition(s));
    return branches.size() == 1 && branches[0] == Branch{1.0, 0.0, s};
}

}  // namespace

std::vector<Violation> validate(const Mdp& model) {
    std::vector<Violation> found;
    const std::size_t n = model.num_states();
    if (n == 0) {
        found.push_back({std::nullopt, std::nullopt, "model has no states"});
        return found;
    }
    if (model.initial() >= n)
        found.push_back({std::nullopt, std::nullopt, "initial state " + std::to_string(model.initial()) + " out of range"});

    for (StateId s = 0; s < n; ++s) {
        if (model.num_transitions(s) == 0) {
            found.push_back({s, std::nullopt, "state has no transitions"});
            continue;
        }
        std::size_t local = 0;
        for (TransitionIndex t : model.transitions(s)) {
            auto report = [&](std::string message) { found.push_back({s, local, std::move(message)}); };
            const auto branches = model.branches(t);
            if (branches.empty()) report("transition has no branches");
            double sum = 0.0;
            for (const Branch& b : branches) {
                if (!(b.probability > 0.0 && b.probability <= 1.0))
                    report("branch probability " + shortest(b.probability) + " outside (0,1]");
                if (!std::isfinite(b.reward) || b.reward < 0.0)
                    report("branch reward " + shortest(b.reward) + " is not a finite non-negative number");
                if (b.target >= n) report("branch target " + std::to_string(b.target) + " out of range");
                sum += b.probability;
            }
            if (!branches.empty() && !(std::fabs(sum - 1.0) <= kProbabilitySumTolerance))
                report("probabilities sum to " + shortest(sum));
            ++local;
        }
    }
    return found;
}

std::string describe(const Violation& violation) {
    std::ostringstream out;
    if (violation.state) out << "state " << *violation.state;
    if (violation.transition) out << " transition " << *violation.transition;
    if (violation.state) out << ": ";
    out << violation.message;
    return out.str();
}

Mdp make_goals_absorbing(const Mdp& model, const StateSet& goals) {
    if (goals.size() != model.num_states()) throw std::out_of_range("goal set does not match the model's state count");
    MdpBuilder builder;
    for (StateId s = 0; s < model.num_states(); ++s) {
        if (goals.contains(s) && !is_absorbing(model, s)) {
            builder.add_state();
            builder.add_transition();
            builder.add_branch(1.0, 0.0, s);
        } else {
            builder.copy_state(model, s);
        }
    }
    builder.set_initial(model.initial());
    return std::move(builder).build();
}

Mdp strip_rewards(const Mdp& model) {
    MdpBuilder builder;
    for (StateId s = 0; s < model.num_states(); ++s) {
        builder.add_state();
        for (TransitionIndex t : model.transitions(s)) {
            builder.add_transition(model.label(t));
            for (const Branch& b : model.branches(t)) builder.add_branch(b.probability, 0.0, b.target);
        }
    }
    builder.set_initial(model.initial());
    return std::move(builder).build();
}

Mdp rebase_initial(const Mdp& model, StateId s) {
    if (s >= model.num_states()) throw std::out_of_range("state " + std::to_string(s) + " out of range");
    MdpBuilder builder;
    for (StateId q = 0; q < model.num_states(); ++q) builder.copy_state(model, q);
    builder.set_initial(s);
    return std::move(builder).build();
}

}  // namespace soundmdp
