#include "soundmdp/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace soundmdp {

std::optional<StateId> ModelDocument::resolve(std::string_view token) const {
    if (auto it = named_states.find(std::string(token)); it != named_states.end()) return it->second;
    StateId id = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (ec != std::errc{} || end != token.data() + token.size() || id >= model.num_states()) return std::nullopt;
    return id;
}

std::optional<std::string> ModelDocument::name_of(StateId s) const {
    for (const auto& [label, id] : named_states)
        if (id == s) return label;
    return std::nullopt;
}

namespace {

std::string located(std::size_t line, std::size_t column, const std::string& message) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(located(line, column, message)), kind_(kind), line_(line), column_(column) {}

namespace {

struct Token {
    std::string_view text;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
    }
    return tokens;
}

bool is_decimal_id(std::string_view text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

template <typename T>
std::optional<T> parse_integer(std::string_view text) {
    T value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return value;
}

// Fractions are exact when both terms fit in a double's mantissa; the quotient
// is then correctly rounded by IEEE division.
std::optional<double> parse_number(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto numerator = parse_integer<std::int64_t>(text.substr(0, slash));
        auto denominator = parse_integer<std::uint64_t>(text.substr(slash + 1));
        constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;
        if (!numerator || !denominator || *denominator == 0) return std::nullopt;
        if (static_cast<std::uint64_t>(std::llabs(*numerator)) > kExactLimit || *denominator > kExactLimit)
            return std::nullopt;
        return static_cast<double>(*numerator) / static_cast<double>(*denominator);
    }
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return value;
}

struct PendingBranch {
    double probability;
    double reward;
    Token target;
    std::size_t line;
};

struct PendingTransition {
    std::optional<std::string> label;
    std::vector<PendingBranch> branches;
    std::size_t line;
};

struct PendingState {
    std::vector<PendingTransition> transitions;
    std::size_t line;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ModelDocument run() {
        std::size_t line_number = 0;
        std::size_t start = 0;
        while (start <= text_.size()) {
            std::size_t end = text_.find('\n', start);
            if (end == std::string_view::npos) end = text_.size();
            ++line_number;
            line_ = line_number;
            handle(tokenize(text_.substr(start, end - start)));
            start = end + 1;
        }
        if (!header_seen_) throw ParseError(ParseError::Kind::syntax, 1, 1, "empty input: expected 'mdpx 1' header");
        return finish();
    }

private:
    [[noreturn]] void syntax(std::size_t column, const std::string& message) const {
        throw ParseError(ParseError::Kind::syntax, line_, column, message);
    }
    [[noreturn]] void semantic(std::size_t line, std::size_t column, const std::string& message) const {
        throw ParseError(ParseError::Kind::semantic, line, column, message);
    }

    void expect_arity(const std::vector<Token>& tokens, std::size_t min, std::size_t max) const {
        if (tokens.size() < min || tokens.size() > max)
            syntax(tokens.front().column, "wrong number of arguments for '" + std::string(tokens.front().text) + "'");
    }

    void handle(const std::vector<Token>& tokens) {
        if (tokens.empty()) return;
        const std::string_view keyword = tokens.front().text;
        if (!header_seen_) {
            if (keyword != "mdpx") syntax(tokens.front().column, "expected 'mdpx 1' header");
            expect_arity(tokens, 2, 2);
            auto version = parse_integer<int>(tokens[1].text);
            if (!version) syntax(tokens[1].column, "invalid format version");
            if (*version != 1)
                throw ParseError(ParseError::Kind::version, line_, tokens[1].column,
                                 "unsupported format version " + std::to_string(*version));
            header_seen_ = true;
            return;
        }
        if (keyword == "states") {
            expect_arity(tokens, 2, 2);
            if (declared_count_) syntax(tokens.front().column, "duplicate 'states' line");
            auto count = parse_integer<std::size_t>(tokens[1].text);
            if (!count || *count == 0) syntax(tokens[1].column, "state count must be a positive integer");
            declared_count_ = *count;
        } else if (keyword == "initial") {
            expect_arity(tokens, 2, 2);
            if (initial_) syntax(tokens.front().column, "duplicate 'initial' line");
            initial_ = tokens[1];
            initial_line_ = line_;
        } else if (keyword == "state") {
            expect_arity(tokens, 2, 3);
            if (!declared_count_) syntax(tokens.front().column, "'state' before 'states'");
            auto id = parse_integer<std::size_t>(tokens[1].text);
            if (!id) syntax(tokens[1].column, "invalid state id");
            if (*id != states_.size())
                semantic(line_, tokens[1].column,
                         "state ids must be declared in order; expected " + std::to_string(states_.size()));
            if (*id >= *declared_count_)
                semantic(line_, tokens[1].column, "state id " + std::to_string(*id) + " exceeds declared count");
            if (tokens.size() == 3) {
                const std::string label(tokens[2].text);
                if (is_decimal_id(label)) semantic(line_, tokens[2].column, "state labels must not be numeric");
                if (!named_.emplace(label, static_cast<StateId>(*id)).second)
                    semantic(line_, tokens[2].column, "duplicate state label '" + label + "'");
            }
            states_.push_back({{}, line_});
        } else if (keyword == "transition") {
            expect_arity(tokens, 1, 2);
            if (states_.empty()) syntax(tokens.front().column, "'transition' outside a state block");
            std::optional<std::string> label;
            if (tokens.size() == 2) label = std::string(tokens[1].text);
            states_.back().transitions.push_back({std::move(label), {}, line_});
        } else if (keyword == "branch") {
            expect_arity(tokens, 4, 4);
            if (states_.empty() || states_.back().transitions.empty())
                syntax(tokens.front().column, "'branch' outside a transition block");
            auto probability = parse_number(tokens[1].text);
            if (!probability) syntax(tokens[1].column, "invalid probability '" + std::string(tokens[1].text) + "'");
            auto reward = parse_number(tokens[2].text);
            if (!reward) syntax(tokens[2].column, "invalid reward '" + std::string(tokens[2].text) + "'");
            states_.back().transitions.back().branches.push_back({*probability, *reward, tokens[3], line_});
        } else if (keyword == "goal") {
            if (tokens.size() < 2) syntax(tokens.front().column, "'goal' needs at least one state");
            for (std::size_t i = 1; i < tokens.size(); ++i) goals_.push_back({tokens[i], line_});
        } else {
            syntax(tokens.front().column, "unknown keyword '" + std::string(keyword) + "'");
        }
    }

    StateId resolve(const Token& token, std::size_t line) const {
        if (auto it = named_.find(std::string(token.text)); it != named_.end()) return it->second;
        auto id = parse_integer<StateId>(token.text);
        if (!id || *id >= states_.size())
            semantic(line, token.column, "unknown state '" + std::string(token.text) + "'");
        return *id;
    }

    ModelDocument finish() {
        if (!declared_count_) semantic(line_, 1, "missing 'states' line");
        if (states_.size() != *declared_count_)
            semantic(line_, 1,
                     "declared " + std::to_string(*declared_count_) + " states but defined " +
                         std::to_string(states_.size()));
        if (!initial_) semantic(line_, 1, "missing 'initial' line");

        MdpBuilder builder;
        for (const PendingState& state : states_) {
            builder.add_state();
            for (const PendingTransition& transition : state.transitions) {
                builder.add_transition(transition.label);
                for (const PendingBranch& branch : transition.branches)
                    builder.add_branch(branch.probability, branch.reward, resolve(branch.target, branch.line));
            }
        }
        builder.set_initial(resolve(*initial_, initial_line_));

        ModelDocument document;
        document.model = std::move(builder).build();
        document.named_states = named_;
        if (!goals_.empty()) {
            StateSet goals(states_.size());
            for (const auto& [token, line] : goals_) goals.insert(resolve(token, line));
            document.declared_goals = goals;
        }

        const auto violations = validate(document.model);
        if (!violations.empty()) {
            const Violation& first = violations.front();
            std::size_t line = line_;
            if (first.state) {
                const PendingState& state = states_[*first.state];
                line = first.transition ? state.transitions[*first.transition].line : state.line;
            }
            semantic(line, 1, describe(first));
        }
        return document;
    }

    std::string_view text_;
    std::size_t line_ = 0;
    bool header_seen_ = false;
    std::optional<std::size_t> declared_count_;
    std::optional<Token> initial_;
    std::size_t initial_line_ = 0;
    std::vector<PendingState> states_;
    std::map<std::string, StateId> named_;
    std::vector<std::pair<Token, std::size_t>> goals_;
};

std::string format17(double x) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    return buffer;
}

}  // namespace

ModelDocument parse_explicit(std::string_view text) { return Parser(text).run(); }

ModelDocument load_explicit(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_explicit(buffer.str());
}

std::string write_explicit(const ModelDocument& document) {
    const Mdp& model = document.model;
    std::ostringstream out;
    out << "mdpx 1\n";
    out << "states " << model.num_states() << "\n";
    out << "initial " << model.initial() << "\n";
    for (StateId s = 0; s < model.num_states(); ++s) {
        out << "state " << s;
        if (auto name = document.name_of(s)) out << ' ' << *name;
        out << '\n';
        for (TransitionIndex t : model.transitions(s)) {
            out << "  transition";
            if (const auto& label = model.label(t)) out << ' ' << *label;
            out << '\n';
            for (const Branch& b : model.branches(t))
                out << "    branch " << format17(b.probability) << ' ' << format17(b.reward) << ' ' << b.target
                    << '\n';
        }
    }
    if (document.declared_goals && !document.declared_goals->empty()) {
        out << "goal";
        for (StateId g : document.declared_goals->members()) out << ' ' << g;
        out << '\n';
    }
    return out.str();
}

}  // namespace soundmdp
