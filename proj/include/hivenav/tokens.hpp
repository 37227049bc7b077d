#ifndef HIVENAV_TOKENS_HPP
#define HIVENAV_TOKENS_HPP

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace hivenav {

using TokenCounts = std::map<std::string, int>;

// Lowercase, split on non-alphanumeric. No stemming.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline TokenCounts token_counts(const std::vector<std::string>& tokens) {
    TokenCounts c;
    for (const auto& t : tokens) ++c[t];
    return c;
}

inline TokenCounts token_counts(const std::string& text) {
    return token_counts(tokenize(text));
}

// Cosine similarity over token count vectors. 0 when either side is empty.
inline double cosine_similarity(const TokenCounts& a, const TokenCounts& b) {
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [tok, n] : a) {
        na += static_cast<double>(n) * n;
        auto it = b.find(tok);
        if (it != b.end()) dot += static_cast<double>(n) * it->second;
    }
    for (const auto& [tok, n] : b) nb += static_cast<double>(n) * n;
    if (dot == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace hivenav

#endif
