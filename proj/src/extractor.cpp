#include "factcheck/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "factcheck/text.hpp"

namespace factcheck {

// ---------------------------------------------------------------------------
// Vocabulary

ExtractorConfig ExtractorConfig::defaults() {
    ExtractorConfig c;
    c.predicates = {
        {"published", {"published", "publishes", "publish", "released", "put out"}, true},
        {"discovered", {"discovered", "discovers"}, false},
        {"founded", {"founded", "founds", "established", "created"}, false},
        {"won", {"won", "wins", "received"}, true},
        {"born", {"born"}, false},
        {"died", {"died", "dies"}, false},
        {"invented", {"invented", "invents"}, false},
        {"wrote", {"wrote", "writes", "written", "authored"}, true},
        {"located", {"located", "situated"}, false},
        {"married", {"married", "marries"}, false},
    };
    return c;
}

ExtractorConfig ExtractorConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open predicate vocabulary {}", path.string()));
    return parse(in, path.string());
}

ExtractorConfig ExtractorConfig::parse(std::istream& in, std::string_view origin) {
    ExtractorConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view l = text::trim(line);
        if (l.empty() || l.front() == '#') continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error(fmt::format("{}:{}: expected 'label = verb, verb'", origin, lineno));
        PredicateSpec spec;
        spec.label = text::to_lower(text::trim(l.substr(0, eq)));
        std::string_view rhs = text::trim(l.substr(eq + 1));
        constexpr std::string_view marker = "[multi]";
        if (rhs.size() >= marker.size() && rhs.substr(rhs.size() - marker.size()) == marker) {
            spec.multi_valued = true;
            rhs = text::trim(rhs.substr(0, rhs.size() - marker.size()));
        }
        for (const auto& verb : text::split(rhs, ',')) {
            auto v = text::to_lower(text::trim(verb));
            if (!v.empty()) spec.surface_verbs.push_back(std::move(v));
        }
        if (spec.label.empty() || spec.surface_verbs.empty())
            throw std::runtime_error(fmt::format("{}:{}: empty label or verb list", origin, lineno));
        c.predicates.push_back(std::move(spec));
    }
    return c;
}

const PredicateSpec* ExtractorConfig::find(std::string_view label) const {
    for (const auto& p : predicates)
        if (p.label == label) return &p;
    return nullptr;
}

bool ExtractorConfig::is_multi_valued(std::string_view label) const {
    const auto* p = find(label);
    return p && p->multi_valued;
}

// ---------------------------------------------------------------------------
// Sentence splitting

std::vector<Span> split_sentences(std::string_view t) {
    std::vector<Span> out;
    auto emit = [&](std::size_t b, std::size_t e) {
        while (b < e && std::isspace(static_cast<unsigned char>(t[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(t[e - 1]))) --e;
        while (e > b && (t[e - 1] == '.' || t[e - 1] == '!' || t[e - 1] == '?')) --e;
        while (e > b && std::isspace(static_cast<unsigned char>(t[e - 1]))) --e;
        if (e > b) out.push_back({b, e});
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const char c = t[i];
        const bool at_end = i + 1 == t.size();
        if (c == '\n') {
            emit(start, i);
            start = i + 1;
        } else if ((c == '.' || c == '!' || c == '?') &&
                   (at_end || std::isspace(static_cast<unsigned char>(t[i + 1])))) {
            emit(start, i + 1);
            start = i + 1;
        }
    }
    emit(start, t.size());
    return out;
}

namespace {

// ---------------------------------------------------------------------------
// Tokens

enum class TokKind { Word, Number, Punct };

struct Token {
    TokKind kind;
    std::size_t begin;  // absolute offsets into the response
    std::size_t end;
    std::string text;   // original text
    std::string lower;
};

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0 || static_cast<unsigned char>(c) >= 0x80;
}

std::vector<Token> tokenize_span(std::string_view all, Span s) {
    std::vector<Token> out;
    std::size_t i = s.begin;
    auto push = [&](TokKind k, std::size_t b, std::size_t e) {
        std::string txt(all.substr(b, e - b));
        out.push_back({k, b, e, txt, text::to_lower(txt)});
    };
    while (i < s.end) {
        const char c = all[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (is_digit(c)) {
            std::size_t j = i;
            while (j < s.end && is_digit(all[j])) ++j;
            // thousands groups "1,083" and decimals "3.5"
            while (j + 1 < s.end) {
                if (all[j] == ',' && j + 3 < s.end && is_digit(all[j + 1]) && is_digit(all[j + 2]) &&
                    is_digit(all[j + 3]) && (j + 4 == s.end || !is_digit(all[j + 4]))) {
                    j += 4;
                } else if (all[j] == '.' && is_digit(all[j + 1])) {
                    j += 1;
                    while (j < s.end && is_digit(all[j])) ++j;
                } else {
                    break;
                }
            }
            if (j < s.end && is_alpha(all[j])) {  // "2nd", "3D": treat as a word
                while (j < s.end && (is_alpha(all[j]) || is_digit(all[j]))) ++j;
                push(TokKind::Word, i, j);
            } else {
                push(TokKind::Number, i, j);
            }
            i = j;
        } else if (is_alpha(c)) {
            std::size_t j = i;
            while (j < s.end &&
                   (is_alpha(all[j]) || is_digit(all[j]) ||
                    ((all[j] == '-' || all[j] == '\'') && j + 1 < s.end && is_alpha(all[j + 1]))))
                ++j;
            push(TokKind::Word, i, j);
            i = j;
        } else {
            push(TokKind::Punct, i, i + 1);
            ++i;
        }
    }
    return out;
}

bool is_capitalized(const Token& t) {
    return t.kind == TokKind::Word && std::isupper(static_cast<unsigned char>(t.text[0]));
}

bool one_of(std::string_view w, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), w) != set.end();
}

bool is_pronoun(std::string_view w) {
    return one_of(w, {"it", "he", "she", "they", "this", "that", "these", "those", "i", "we", "you",
                      "there", "here", "its", "his", "her", "their", "our", "my"});
}
bool is_determiner(std::string_view w) { return one_of(w, {"the", "a", "an"}); }
bool is_copula(std::string_view w) { return one_of(w, {"is", "was", "are", "were"}); }
bool is_possession(std::string_view w) { return one_of(w, {"has", "have", "had"}); }
bool is_preposition(std::string_view w) { return one_of(w, {"in", "on", "at", "by", "to", "from", "of"}); }

std::optional<int> month_number(std::string_view lower) {
    static constexpr std::array<std::string_view, 12> months = {
        "january", "february", "march",     "april",   "may",      "june",
        "july",    "august",   "september", "october", "november", "december"};
    for (std::size_t i = 0; i < months.size(); ++i)
        if (lower == months[i]) return static_cast<int>(i + 1);
    return std::nullopt;
}

bool is_year_token(const Token& t) {
    if (t.kind != TokKind::Number) return false;
    if (t.text.size() < 3 || t.text.size() > 4) return false;
    return std::all_of(t.text.begin(), t.text.end(), is_digit);
}

bool is_day_token(const Token& t) {
    if (t.kind != TokKind::Number || t.text.size() > 2) return false;
    const int d = std::stoi(t.text);
    return d >= 1 && d <= 31;
}

struct DateMatch {
    Date date;
    std::size_t first;  // token index of the first date token (excluding preposition)
    std::size_t last;   // token index of the last date token
};

// Date phrase starting at token i (no preposition): "1920", "March 1920",
// "14 March 1879", "March 14, 1879".
std::optional<DateMatch> match_date_at(const std::vector<Token>& toks, std::size_t i, std::size_t end) {
    if (i >= end) return std::nullopt;
    if (is_year_token(toks[i])) return DateMatch{Date{std::stoi(toks[i].text), {}, {}}, i, i};
    if (auto m = month_number(toks[i].lower)) {
        if (i + 1 < end && is_year_token(toks[i + 1]))
            return DateMatch{Date{std::stoi(toks[i + 1].text), *m, {}}, i, i + 1};
        if (i + 3 < end && is_day_token(toks[i + 1]) && toks[i + 2].text == "," && is_year_token(toks[i + 3]))
            return DateMatch{Date{std::stoi(toks[i + 3].text), *m, std::stoi(toks[i + 1].text)}, i, i + 3};
    }
    if (is_day_token(toks[i]) && i + 2 < end) {
        if (auto m = month_number(toks[i + 1].lower); m && is_year_token(toks[i + 2]))
            return DateMatch{Date{std::stoi(toks[i + 2].text), *m, std::stoi(toks[i].text)}, i, i + 2};
    }
    return std::nullopt;
}

// "in|on <date>" starting at token i.
std::optional<DateMatch> match_prep_date_at(const std::vector<Token>& toks, std::size_t i, std::size_t end) {
    if (i >= end || !(toks[i].lower == "in" || toks[i].lower == "on")) return std::nullopt;
    return match_date_at(toks, i + 1, end);
}

double multiplier_of(std::string_view lower) {
    if (lower == "thousand") return 1e3;
    if (lower == "million") return 1e6;
    if (lower == "billion") return 1e9;
    return 1.0;
}

struct QuantityMatch {
    Quantity q;
    std::size_t first;
    std::size_t last;   // index of the unit token
};

// "<number> [million] <unit>" at token i.
std::optional<QuantityMatch> match_quantity_at(const std::vector<Token>& toks, std::size_t i, std::size_t end) {
    if (i >= end || toks[i].kind != TokKind::Number) return std::nullopt;
    std::string digits;
    for (char c : toks[i].text)
        if (c != ',') digits.push_back(c);
    double v = std::stod(digits);
    std::size_t j = i + 1;
    if (j < end && multiplier_of(toks[j].lower) != 1.0) {
        v *= multiplier_of(toks[j].lower);
        ++j;
    }
    if (j >= end || toks[j].kind != TokKind::Word || is_preposition(toks[j].lower)) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return QuantityMatch{Quantity{v, toks[j].lower}, i, j};
}

std::string dimension_of(std::string_view adjective) {
    if (adjective == "tall" || adjective == "high") return "height";
    if (adjective == "long") return "length";
    if (adjective == "old") return "age";
    if (adjective == "wide") return "width";
    if (adjective == "deep") return "depth";
    if (adjective == "heavy") return "weight";
    return {};
}

// ---------------------------------------------------------------------------
// Sentence grammar

class SentenceParser {
  public:
    SentenceParser(std::string_view all, Span sentence, const ExtractorConfig& cfg, const AliasTable& aliases)
        : all_(all), sentence_(sentence), cfg_(cfg), aliases_(aliases), toks_(tokenize_span(all, sentence)) {
        // Parentheticals and clauses after ';' never carry the claim.
        end_ = toks_.size();
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            if (toks_[i].text == "(" || toks_[i].text == ";" || toks_[i].text == ":") {
                end_ = i;
                break;
            }
        }
    }

    std::optional<Claim> parse() {
        if (end_ < 2) return std::nullopt;
        if (is_pronoun(toks_[0].lower)) return std::nullopt;

        for (std::size_t v = 1; v < end_; ++v) {
            const Token& t = toks_[v];
            if (t.kind == TokKind::Punct) return std::nullopt;  // subject may not contain punctuation
            if (is_copula(t.lower)) return finish(parse_copula(v));
            if (is_possession(t.lower)) return finish(parse_possession(v));
            if (auto m = match_verb(v)) return finish(parse_verb_object(m->first, m->second, false));
        }
        return finish(parse_unknown_verb());
    }

  private:
    struct Parsed {
        std::size_t verb;  // first verb token
        std::string predicate;
        ClaimValue object;
        std::vector<ClaimValue> extras;
        Span object_span;
        std::optional<Span> complement_span;
        std::optional<YearRange> qualifier;
    };

    // Vocabulary verb starting at token v: (end token index exclusive, label).
    std::optional<std::pair<std::size_t, std::string>> match_verb(std::size_t v) const {
        std::optional<std::pair<std::size_t, std::string>> best;
        for (const auto& p : cfg_.predicates) {
            for (const auto& verb : p.surface_verbs) {
                auto words = text::split(verb, ' ');
                std::erase_if(words, [](const std::string& w) { return w.empty(); });
                if (words.empty() || v + words.size() > end_) continue;
                bool ok = true;
                for (std::size_t k = 0; k < words.size() && ok; ++k) ok = toks_[v + k].lower == words[k];
                if (ok && (!best || v + words.size() > best->first)) best = {{v + words.size(), p.label}};
            }
        }
        return best;
    }

    Span span_of(std::size_t first, std::size_t last) const { return {toks_[first].begin, toks_[last].end}; }

    // Noun phrase from token i up to the next punctuation or "in <year>".
    std::optional<std::pair<std::size_t, std::size_t>> noun_phrase(std::size_t i,
                                                                   std::optional<YearRange>* qualifier) const {
        std::size_t j = i;
        while (j < end_ && toks_[j].kind != TokKind::Punct) {
            if (qualifier) {
                if (auto d = match_prep_date_at(toks_, j, end_)) {
                    *qualifier = YearRange{d->date.year, d->date.year};
                    break;
                }
            }
            ++j;
        }
        if (j == i) return std::nullopt;
        return std::pair{i, j - 1};
    }

    ClaimValue phrase_value(std::size_t first, std::size_t last) const {
        std::size_t f = first;
        if (is_determiner(toks_[f].lower) && f < last) ++f;
        const Span s = span_of(f, last);
        EntityRef e = link_entity(all_.substr(s.begin, s.length()), aliases_, cfg_.link_threshold);
        if (e.linked()) {
            const std::string display = aliases_.display_name(e.canonical_id);
            if (!display.empty()) e.surface_form = display;
            return ClaimValue(std::move(e));
        }
        const Span whole = span_of(first, last);
        return ClaimValue(Text{std::string(all_.substr(whole.begin, whole.length()))});
    }

    std::optional<Parsed> parse_copula(std::size_t v) {
        std::size_t i = v + 1;
        if (i >= end_) return std::nullopt;
        // "was born in 1879", "is located in France"
        if (auto m = match_verb(i)) {
            auto p = parse_verb_object(m->first, m->second, true);
            if (p) p->verb = v;
            return p;
        }
        // "is 300 meters tall"
        if (auto q = match_quantity_at(toks_, i, end_)) {
            std::string pred = "measure";
            if (q->last + 1 < end_) {
                auto dim = dimension_of(toks_[q->last + 1].lower);
                if (!dim.empty()) pred = dim;
            }
            return Parsed{v, pred, ClaimValue(q->q), {}, span_of(q->first, q->last), std::nullopt, std::nullopt};
        }
        // "is the capital of France": object must open with a determiner or a name
        const Token& head = toks_[i];
        if (!(is_determiner(head.lower) || is_capitalized(head))) return std::nullopt;
        std::optional<YearRange> qualifier;
        auto np = noun_phrase(i, &qualifier);
        if (!np) return std::nullopt;
        return Parsed{v,           std::string(kCopulaPredicate), phrase_value(np->first, np->second), {},
                      span_of(np->first, np->second), std::nullopt, qualifier};
    }

    std::optional<Parsed> parse_possession(std::size_t v) {
        auto q = match_quantity_at(toks_, v + 1, end_);
        if (!q) return std::nullopt;
        return Parsed{v, std::string(kPossessionPredicate), ClaimValue(q->q), {}, span_of(q->first, q->last),
                      std::nullopt, std::nullopt};
    }

    // Remainder after the verb: "[Y] in <date> [and [Y2] in <date2>]",
    // "<quantity>", or an object phrase.
    std::optional<Parsed> parse_verb_object(std::size_t after_verb, std::string label, bool passive) {
        const std::size_t verb = after_verb - 1;
        std::size_t i = after_verb;
        if (i >= end_) return std::nullopt;

        // Earliest "in/on <date>" in the remainder.
        for (std::size_t j = i; j < end_; ++j) {
            auto d = match_prep_date_at(toks_, j, end_);
            if (!d) continue;
            Parsed p{verb, label, ClaimValue(d->date), {}, span_of(d->first, d->last), std::nullopt, std::nullopt};
            if (j > i) {
                std::size_t cf = i;
                if (passive && is_preposition(toks_[cf].lower) && cf + 1 < j) ++cf;
                p.complement_span = span_of(cf, j - 1);
            }
            // Conjunctive continuation: "and 1915" | "and <Y2> in 1915"
            std::size_t k = d->last + 1;
            while (k < end_ && (toks_[k].lower == "and" || toks_[k].text == ",")) {
                std::size_t n = k + 1;
                if (n < end_ && toks_[n].lower == "and") ++n;
                std::optional<DateMatch> next = match_date_at(toks_, n, end_);
                if (!next) {
                    for (std::size_t m = n; m < end_ && m < n + 6; ++m) {
                        if (toks_[m].kind == TokKind::Punct) break;
                        if ((next = match_prep_date_at(toks_, m, end_))) break;
                    }
                }
                if (!next) break;
                p.extras.emplace_back(next->date);
                p.object_span.end = toks_[next->last].end;
                k = next->last + 1;
            }
            return p;
        }

        std::size_t f = i;
        if (is_preposition(toks_[f].lower) && f + 1 < end_) {
            if (passive && toks_[f].lower == "by") label += "_by";
            ++f;
        }
        if (auto q = match_quantity_at(toks_, f, end_))
            return Parsed{verb, label, ClaimValue(q->q), {}, span_of(q->first, q->last), std::nullopt, std::nullopt};
        auto np = noun_phrase(f, nullptr);
        if (!np) return std::nullopt;
        return Parsed{verb, label, phrase_value(np->first, np->second), {}, span_of(np->first, np->second),
                      std::nullopt, std::nullopt};
    }

    // "<Name> <unknown verb> ... in <year>" -> related_to
    std::optional<Parsed> parse_unknown_verb() {
        std::size_t v = 0;
        while (v < end_ && is_capitalized(toks_[v])) ++v;
        if (v == 0 || v >= end_ || toks_[v].kind != TokKind::Word) return std::nullopt;
        if (is_preposition(toks_[v].lower) || is_determiner(toks_[v].lower)) return std::nullopt;
        for (std::size_t j = v + 1; j < end_; ++j)
            if (match_prep_date_at(toks_, j, end_)) return parse_verb_object(v + 1, std::string(kUnknownPredicate), false);
        return std::nullopt;
    }

    std::optional<Claim> finish(std::optional<Parsed> p) const {
        if (!p || p->verb == 0) return std::nullopt;
        std::size_t sf = 0;
        if (is_determiner(toks_[0].lower) && p->verb > 1) sf = 1;
        const Span subj = span_of(sf, p->verb - 1);

        Claim c;
        c.subject = link_entity(all_.substr(subj.begin, subj.length()), aliases_, cfg_.link_threshold);
        c.predicate = p->predicate;
        c.object = std::move(p->object);
        c.extra_objects = std::move(p->extras);
        c.temporal_qualifier = p->qualifier;
        c.span = sentence_;
        c.raw_text = std::string(all_.substr(sentence_.begin, sentence_.length()));
        c.object_span = p->object_span;
        c.complement_span = p->complement_span;
        if (c.complement_span)
            c.complement = std::string(all_.substr(c.complement_span->begin, c.complement_span->length()));
        return c;
    }

    std::string_view all_;
    Span sentence_;
    const ExtractorConfig& cfg_;
    const AliasTable& aliases_;
    std::vector<Token> toks_;
    std::size_t end_ = 0;
};

}  // namespace

std::vector<Claim> extract_claims(std::string_view response_text, const ExtractorConfig& config,
                                  const AliasTable& aliases) {
    std::vector<Claim> claims;
    for (const Span& s : split_sentences(response_text)) {
        SentenceParser parser(response_text, s, config, aliases);
        if (auto c = parser.parse()) {
            c->id = fmt::format("c{}", claims.size());
            claims.push_back(std::move(*c));
        }
    }
    return claims;
}

PatternExtractor::PatternExtractor(ExtractorConfig config, std::shared_ptr<const AliasTable> aliases)
    : config_(std::move(config)), aliases_(std::move(aliases)) {
    if (!aliases_) aliases_ = std::make_shared<const AliasTable>();
}

std::vector<Claim> PatternExtractor::extract(std::string_view response_text) const {
    return extract_claims(response_text, config_, *aliases_);
}

}  // namespace factcheck
