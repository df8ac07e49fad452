#include "wmdp/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace wmdp {

namespace {

struct Lexer {
    const std::string& line;
    int lineno;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= line.size() || line[pos] == '#';
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw Error(ErrorKind::Syntax,
                    "line " + std::to_string(lineno) + ", col " + std::to_string(pos + 1) + ": " + msg);
    }
    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r' &&
               line[pos] != ',' && line[pos] != ':' && line[pos] != '#')
            ++pos;
        if (start == pos) fail("expected a token");
        return line.substr(start, pos - start);
    }
    bool accept(char c) {
        skip_ws();
        if (pos < line.size() && line[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

Int parse_int(Lexer& lx) {
    std::size_t at = lx.pos;
    std::string w = lx.word();
    Int v;
    if (v.set_str(w[0] == '+' ? w.substr(1) : w, 10) != 0) {
        lx.pos = at;
        lx.skip_ws();
        lx.fail("expected an integer, got '" + w + "'");
    }
    return v;
}

Rat parse_prob(Lexer& lx) {
    std::size_t at = lx.pos;
    std::string w = lx.word();
    Rat q;
    auto slash = w.find('/');
    Int num, den = 1;
    bool ok = num.set_str(w.substr(0, slash), 10) == 0;
    if (slash != std::string::npos) ok = ok && den.set_str(w.substr(slash + 1), 10) == 0;
    if (!ok || den == 0) {
        lx.pos = at;
        lx.skip_ws();
        lx.fail("expected a probability p/q, got '" + w + "'");
    }
    q = Rat(num, den);
    q.canonicalize();
    return q;
}

}  // namespace

Mdp parse_model_text(const std::string& text) {
    Mdp m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::set<std::string> declared;
    auto state_id = [&](const std::string& name) {
        int s = m.find_state(name);
        return s < 0 ? m.add_state(name) : s;
    };
    while (std::getline(in, line)) {
        ++lineno;
        Lexer lx{line, lineno};
        if (lx.done()) continue;
        std::string first = lx.word();
        if (first == "state") {
            std::string name = lx.word();
            if (!declared.insert(name).second)
                throw Error(ErrorKind::DuplicateTransition,
                            "line " + std::to_string(lineno) + ": state '" + name + "' declared twice");
            state_id(name);
            if (!lx.done()) lx.fail("trailing input");
            continue;
        }
        int s = state_id(first);
        Action act;
        act.name = lx.word();
        act.weight = parse_int(lx);
        if (!lx.accept(':')) lx.fail("expected ':'");
        while (!lx.done()) {
            int t = state_id(lx.word());
            act.succ.push_back({t, parse_prob(lx)});
            lx.accept(',');
        }
        if (act.succ.empty()) lx.fail("empty distribution");
        for (const auto& other : m.actions[s])
            if (other.name == act.name)
                throw Error(ErrorKind::DuplicateTransition, "line " + std::to_string(lineno) + ": (" +
                                                                first + "," + act.name + ") declared twice");
        m.actions[s].push_back(std::move(act));
        try {
            Mdp probe;
            probe.names = m.names;
            probe.actions.resize(m.size());
            probe.actions[s].push_back(m.actions[s].back());
            validate_mdp(probe);
        } catch (const Error& e) {
            throw Error(e.kind(), "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return validate_mdp(std::move(m));
}

Mdp parse_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Syntax, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_model_text(ss.str());
}

std::string write_model(const Mdp& m) {
    std::ostringstream out;
    for (int s = 0; s < m.size(); ++s) out << "state " << m.names[s] << "\n";
    for (int s = 0; s < m.size(); ++s)
        for (const auto& act : m.actions[s]) {
            out << m.names[s] << " " << act.name << " " << act.weight.get_str() << " :";
            for (std::size_t i = 0; i < act.succ.size(); ++i)
                out << (i ? ", " : " ") << m.names[act.succ[i].target] << " " << act.succ[i].prob.get_str();
            out << "\n";
        }
    return out.str();
}

}  // namespace wmdp
