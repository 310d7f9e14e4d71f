#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "docmap/error.hpp"
#include "docmap/evaluation.hpp"

using namespace docmap;

namespace {

KeywordSet preds(const std::string& id, std::initializer_list<const char*> words, Method m = Method::yake) {
    KeywordSet ks{id, m, {}};
    int r = 1;
    for (const char* w : words) ks.keywords.push_back({w, 0.0, r++});
    return ks;
}

Document doc(const std::string& id, std::optional<std::vector<std::string>> gold) {
    return Document{id, "", "text", std::move(gold)};
}

}  // namespace

TEST_CASE("normalize: case, punctuation, stems") {
    CHECK(normalize_keyword("Aging") == "ag");
    CHECK(normalize_keyword("  Ageing   Studies ") == normalize_keyword("ageing study"));
    CHECK(normalize_keyword("insulin/IGF-1 signaling") == "insulin igf 1 signal");
}

TEST_CASE("match: examples") {
    CHECK(match({"Aging"}, {"aging"}) == 1);
    CHECK(match({"ageing studies"}, {"ageing study"}) == 1);
    CHECK(match({"mouse"}, {"mice"}) == 0);
    // A gold keyword is consumed by its first match.
    CHECK(match({"aging", "Aging"}, {"aging"}) == 1);
    CHECK(match({"aging", "Aging"}, {"aging", "AGING"}) == 2);
}

TEST_CASE("prf: hand arithmetic") {
    const auto p = prf_at_n(preds("d", {"a", "b", "c", "d"}), {"a", "e"}, 4);
    CHECK(p.precision == doctest::Approx(0.25));
    CHECK(p.recall == doctest::Approx(0.5));
    CHECK(p.f1 == doctest::Approx(1.0 / 3.0));
    const auto id = prf_at_n(preds("d", {"x", "y"}), {"x", "y"}, 2);
    CHECK(id.precision == 1.0);
    CHECK(id.recall == 1.0);
    CHECK(id.f1 == 1.0);
    const auto zero = prf_at_n(preds("d", {"x"}), {"y"}, 1);
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);
}

TEST_CASE("prf: short prediction list") {
    const auto p = prf_at_n(preds("d", {"a", "b"}), {"a"}, 5);
    CHECK(p.precision == doctest::Approx(0.5));
    CHECK(p.recall == 1.0);
}

TEST_CASE("evaluate: macro averages and exclusions") {
    const Corpus corpus({doc("1", std::vector<std::string>{"a"}), doc("2", std::vector<std::string>{"b"}),
                         doc("3", std::nullopt)});
    const auto r = evaluate({preds("1", {"a", "x"}), preds("2", {"y", "b"}), preds("3", {"a"})}, corpus, 2);
    CHECK(r.docs_evaluated == 2);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].precision == doctest::Approx(0.5));
    CHECK(r.rows[0].recall == doctest::Approx(0.5));
    CHECK(r.rows[1].recall == doctest::Approx(1.0));
    CHECK(r.rows[1].recall >= r.rows[0].recall);
    CHECK(r.method == "yake");
    // Document 3 has no gold: dropping its predictions changes nothing.
    const auto r2 = evaluate({preds("1", {"a", "x"}), preds("2", {"y", "b"})}, corpus, 2);
    CHECK(r2.rows[1].f1 == r.rows[1].f1);
}

TEST_CASE("evaluate: F1 of means option") {
    const Corpus corpus({doc("1", std::vector<std::string>{"a"}), doc("2", std::vector<std::string>{"b", "c"})});
    const auto sets = std::vector<KeywordSet>{preds("1", {"a"}), preds("2", {"z"})};
    const auto mean_f1 = evaluate(sets, corpus, 1);
    EvalOptions o;
    o.f1_of_means = true;
    const auto f1_means = evaluate(sets, corpus, 1, o);
    CHECK(mean_f1.rows[0].f1 == doctest::Approx(0.5));
    // P = 0.5, R = 0.5 -> F1 = 0.5 as well here; change R to separate them.
    const Corpus c2({doc("1", std::vector<std::string>{"a", "b"}), doc("2", std::vector<std::string>{"c"})});
    const auto s2 = std::vector<KeywordSet>{preds("1", {"a"}), preds("2", {"z"})};
    const auto a = evaluate(s2, c2, 1);
    const auto b = evaluate(s2, c2, 1, o);
    CHECK(a.rows[0].f1 == doctest::Approx((2.0 / 3.0) / 2.0));
    CHECK(b.rows[0].f1 == doctest::Approx(2 * 0.5 * 0.25 / 0.75));
    CHECK(f1_means.rows[0].f1 == doctest::Approx(0.5));
}

TEST_CASE("evaluate: errors") {
    const Corpus no_gold({doc("1", std::nullopt)});
    CHECK_THROWS_AS(evaluate({preds("1", {"a"})}, no_gold, 5), NoGoldKeywordsError);
    const Corpus gold({doc("1", std::vector<std::string>{"a"})});
    CHECK_THROWS_AS(evaluate({}, gold, 5), ContractError);
}

TEST_CASE("evaluate: recall never drops as n grows") {
    const Corpus corpus({doc("1", std::vector<std::string>{"a", "b", "c"}), doc("2", std::vector<std::string>{"d"})});
    const auto r = evaluate({preds("1", {"x", "a", "y", "c", "b"}), preds("2", {"q", "r", "d"})}, corpus, 20);
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].recall >= r.rows[i - 1].recall);
}

TEST_CASE("CSV round trip") {
    const Corpus corpus({doc("1", std::vector<std::string>{"a"})});
    std::vector<EvalReport> reports{evaluate({preds("1", {"a", "b"}, Method::rake)}, corpus, 3),
                                    evaluate({preds("1", {"b", "a"}, Method::tfidf)}, corpus, 3)};
    const auto csv = reports_to_csv(reports);
    CHECK(csv.rfind("method,n,precision,recall,f1\n", 0) == 0);
    CHECK(csv.find("rake,1,1.000000,1.000000,1.000000") != std::string::npos);
    const auto back = reports_from_csv(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[1].method == "tfidf");
    CHECK(back[1].rows.size() == 3);
    CHECK(back[1].rows[1].recall == 1.0);
    CHECK(pr_curve_to_csv(reports).rfind("method,n,recall,precision\n", 0) == 0);
}
