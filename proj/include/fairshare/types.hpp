#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <string_view>

namespace fairshare {

enum class Group { A = 0, B = 1 };
enum class Article { a = 0, b = 1 };

inline constexpr std::array<Group, 2> kGroups{Group::A, Group::B};
inline constexpr std::array<Article, 2> kArticles{Article::a, Article::b};

constexpr Group opposite(Group g) { return g == Group::A ? Group::B : Group::A; }
constexpr Article opposite(Article s) { return s == Article::a ? Article::b : Article::a; }

/// In-group article of a group: A prefers a, B prefers b.
constexpr Article preferred(Group g) { return g == Group::A ? Article::a : Article::b; }

constexpr std::size_t index(Group g) { return static_cast<std::size_t>(g); }
constexpr std::size_t index(Article s) { return static_cast<std::size_t>(s); }

std::string_view to_string(Group g);
std::string_view to_string(Article s);
Group parse_group(std::string_view text);
Article parse_article(std::string_view text);

/// Value per (group, article) cell.
template <class T>
struct GroupArticle {
    std::array<T, 4> cells{};

    constexpr T& operator()(Group g, Article s) { return cells[2 * index(g) + index(s)]; }
    constexpr const T& operator()(Group g, Article s) const { return cells[2 * index(g) + index(s)]; }

    static constexpr GroupArticle filled(const T& v) { return GroupArticle{{v, v, v, v}}; }

    bool operator==(const GroupArticle& other) const
        requires std::equality_comparable<T>
    {
        return cells == other.cells;
    }
};

/// Platform decision. Only the fractions shown article a are stored; the b share is implied.
struct Targeting {
    double theta_A_a = 0.0;
    double theta_B_a = 0.0;

    double theta(Group g, Article s) const {
        const double shown_a = g == Group::A ? theta_A_a : theta_B_a;
        return s == Article::a ? shown_a : 1.0 - shown_a;
    }

    bool operator==(const Targeting&) const = default;
};

/// Throws InvalidParameter unless both fractions are in [0, 1].
void validate(const Targeting& theta);

}  // namespace fairshare
