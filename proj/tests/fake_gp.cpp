// Stand-in for the CAS in live-mode tests. Reads the generated script,
// pulls out P, p and n, and prints what a ray class computation of modulus
// p^n would print for a few known fields:
//   structure = [p^(n-1), p^min(n-2, e_1), ...], one entry per torsion factor.
// Invocation: fake_gp -q -f script.gp
//   FAKE_GP_GARBAGE=1   reply with nonsense
//   FAKE_GP_LOG=path    append "P|p|n" per call

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Known {
    std::vector<int> exponents;  // torsion cyclic factors, saturating at p^(n-2)
    std::string disc;
};

std::string field_after(const std::string& text, const std::string& name) {
    auto pos = text.find("\n" + name + " = ");
    if (pos == std::string::npos) return {};
    pos += name.size() + 4;
    auto end = text.find(';', pos);
    return text.substr(pos, end - pos);
}

std::string pw(unsigned long p, int e) {
    unsigned long long v = 1;
    bool big = false;
    for (int i = 0; i < e; ++i) {
        if (v > (1ULL << 62) / p) big = true;
        v *= p;
    }
    if (!big) return std::to_string(v);
    return std::to_string(p) + "^" + std::to_string(e);  // unparsable on purpose: tests keep n small
}

} // namespace

int main(int argc, char** argv) {
    std::string path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "-f") path = argv[i + 1];
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "cannot read script\n");
        return 2;
    }
    std::stringstream ss;
    ss << "\n" << in.rdbuf();
    const std::string text = ss.str();
    const std::string P = field_after(text, "P");
    const unsigned long p = std::stoul(field_after(text, "p"));
    const int n = std::stoi(field_after(text, "n"));

    if (const char* log = std::getenv("FAKE_GP_LOG")) {
        std::ofstream out(log, std::ios::app);
        out << P << "|" << p << "|" << n << "\n";
    }
    if (std::getenv("FAKE_GP_GARBAGE")) {
        std::printf("  ***   bug in bnrinit\nvptor=?\n");
        return 0;
    }

    // T_K = Z/2^11 x Z/2 for x^2 - 4194305 at p = 2.
    static const std::map<std::pair<std::string, unsigned long>, Known> table = {
        {{"x^2 - 4194305", 2}, {{11, 1}, "4194305"}},
        {{"x^2 - 41", 2}, {{4}, "41"}},
        {{"x^2 - 229", 3}, {{1}, "229"}},
        {{"x^2 - 5", 7}, {{}, "5"}},
        {{"x^3 + x^2 - 6*x - 7", 3}, {{1}, "361"}},
    };
    auto it = table.find({P, p});
    if (it == table.end()) {
        std::fprintf(stderr, "  ***   unknown field %s\n", P.c_str());
        return 1;
    }
    const Known& k = it->second;
    std::vector<std::string> s{pw(p, n - 1)};
    int v = 0;
    if (p == 2 && n == 2 && k.exponents.size() == 2) {
        // what gp prints for 4194305 at n = 2
        s.push_back("2");
        v = 1;
    } else {
        for (int e : k.exponents) {
            int got = std::max(0, std::min(n - 2, e));
            v += got;
            s.push_back(pw(p, got));
        }
    }
    std::printf("vptor=%d\n", v);
    std::printf("structure=[");
    for (size_t i = 0; i < s.size(); ++i) std::printf("%s%s", i ? ", " : "", s[i].c_str());
    std::printf("]\n");
    std::printf("disc=%s\nversion=[2, 15, 5]\n", k.disc.c_str());
    return 0;
}
