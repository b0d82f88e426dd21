#include "chemtext/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "chemtext/util.hpp"

namespace chemtext {

SmilesError::SmilesError(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " (position " + std::to_string(pos) + ")"), position(pos) {}

namespace {

struct RingOpen {
    int atom;
    int pending_order;  // 0 = unspecified
    std::size_t pos;    // where the ring index appeared
};

struct Parser {
    std::string_view s;
    std::size_t i = 0;
    MolGraph mol;
    std::vector<int> branch_stack;
    int prev_atom = -1;
    int pending_order = 0;  // explicit bond symbol awaiting the next atom
    std::size_t pending_pos = 0;
    std::map<int, RingOpen> rings;

    [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
        throw SmilesError(msg, pos);
    }

    char peek() const { return i < s.size() ? s[i] : '\0'; }

    void add_bond(int a, int b, BondOrder order, std::size_t pos) {
        if (a == b) fail("ring bond to self", pos);
        mol.bonds.push_back({a, b, order});
    }

    BondOrder implicit_order(int a, int b) const {
        const bool both_aromatic = mol.atoms[static_cast<std::size_t>(a)].aromatic &&
                                   mol.atoms[static_cast<std::size_t>(b)].aromatic;
        return both_aromatic ? BondOrder::Aromatic : BondOrder::Single;
    }

    void attach(int atom, std::size_t pos) {
        if (prev_atom >= 0) {
            BondOrder order = pending_order ? static_cast<BondOrder>(pending_order)
                                            : implicit_order(prev_atom, atom);
            add_bond(prev_atom, atom, order, pos);
        } else if (pending_order) {
            fail("bond symbol with no preceding atom", pending_pos);
        }
        pending_order = 0;
        prev_atom = atom;
    }

    void ring_closure(int index, std::size_t pos) {
        if (prev_atom < 0) fail("ring index with no preceding atom", pos);
        auto it = rings.find(index);
        if (it == rings.end()) {
            rings.emplace(index, RingOpen{prev_atom, pending_order, pos});
            pending_order = 0;
            return;
        }
        RingOpen open = it->second;
        rings.erase(it);
        int order = pending_order ? pending_order : open.pending_order;
        if (pending_order && open.pending_order && pending_order != open.pending_order)
            fail("conflicting ring bond orders", pos);
        BondOrder bo = order ? static_cast<BondOrder>(order) : implicit_order(open.atom, prev_atom);
        add_bond(open.atom, prev_atom, bo, pos);
        pending_order = 0;
    }

    int add_atom(std::string element, bool aromatic, int charge) {
        mol.atoms.push_back({std::move(element), aromatic, charge});
        return static_cast<int>(mol.atoms.size()) - 1;
    }

    void parse_bracket_atom() {
        const std::size_t start = i;
        ++i;  // consume '['
        if (i >= s.size()) fail("unterminated bracket atom", start);
        if (is_ascii_digit(s[i])) fail("isotopes are not supported", i);

        std::string element;
        bool aromatic = false;
        if (std::islower(static_cast<unsigned char>(s[i]))) {
            aromatic = true;
            element = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(s[i]))));
            ++i;
        } else if (std::isupper(static_cast<unsigned char>(s[i]))) {
            element += s[i++];
            if (i < s.size() && std::islower(static_cast<unsigned char>(s[i]))) element += s[i++];
        } else {
            fail("expected element symbol in bracket atom", i);
        }

        // hydrogen count: read and ignore (no implicit-H bookkeeping needed)
        if (i < s.size() && s[i] == 'H' && element != "H") {
            ++i;
            while (i < s.size() && is_ascii_digit(s[i])) ++i;
        }

        int charge = 0;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            const int sign = s[i] == '+' ? 1 : -1;
            char symbol = s[i];
            ++i;
            if (i < s.size() && is_ascii_digit(s[i])) {
                int magnitude = 0;
                while (i < s.size() && is_ascii_digit(s[i])) magnitude = magnitude * 10 + (s[i++] - '0');
                charge = sign * magnitude;
            } else {
                charge = sign;
                while (i < s.size() && s[i] == symbol) {
                    charge += sign;
                    ++i;
                }
            }
        }
        if (i >= s.size() || s[i] != ']') fail("unterminated bracket atom", start);
        ++i;  // consume ']'
        attach(add_atom(std::move(element), aromatic, charge), start);
    }

    void parse_organic_atom() {
        const std::size_t start = i;
        char c = s[i];
        if (std::islower(static_cast<unsigned char>(c))) {
            static const std::set<char> kAromatic = {'b', 'c', 'n', 'o', 'p', 's'};
            if (!kAromatic.count(c)) fail(std::string("unknown symbol '") + c + "'", i);
            ++i;
            attach(add_atom(std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c)))), true, 0),
                   start);
            return;
        }
        // two-letter symbols first
        if (c == 'C' && i + 1 < s.size() && s[i + 1] == 'l') {
            i += 2;
            attach(add_atom("Cl", false, 0), start);
            return;
        }
        if (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r') {
            i += 2;
            attach(add_atom("Br", false, 0), start);
            return;
        }
        static const std::set<char> kOrganic = {'B', 'C', 'N', 'O', 'P', 'S', 'F', 'I'};
        if (!kOrganic.count(c)) fail(std::string("unknown symbol '") + c + "'", i);
        ++i;
        attach(add_atom(std::string(1, c), false, 0), start);
    }

    MolGraph run() {
        if (trim(s).empty()) fail("empty SMILES", 0);
        while (i < s.size()) {
            const char c = s[i];
            if (c == '[') {
                parse_bracket_atom();
            } else if (c == '(') {
                if (prev_atom < 0) fail("branch with no preceding atom", i);
                branch_stack.push_back(prev_atom);
                ++i;
            } else if (c == ')') {
                if (branch_stack.empty()) fail("unbalanced ')'", i);
                prev_atom = branch_stack.back();
                branch_stack.pop_back();
                ++i;
            } else if (c == '-' || c == '=' || c == '#' || c == ':') {
                if (pending_order) fail("duplicate bond symbol", i);
                pending_order = (c == '-')   ? static_cast<int>(BondOrder::Single)
                                : (c == '=') ? static_cast<int>(BondOrder::Double)
                                : (c == '#') ? static_cast<int>(BondOrder::Triple)
                                             : static_cast<int>(BondOrder::Aromatic);
                pending_pos = i;
                ++i;
            } else if (is_ascii_digit(c)) {
                ring_closure(c - '0', i);
                ++i;
            } else if (c == '%') {
                if (i + 2 >= s.size() || !is_ascii_digit(s[i + 1]) || !is_ascii_digit(s[i + 2]))
                    fail("'%' ring index needs two digits", i);
                ring_closure((s[i + 1] - '0') * 10 + (s[i + 2] - '0'), i);
                i += 3;
            } else if (c == '.') {
                if (pending_order) fail("bond symbol before '.'", pending_pos);
                prev_atom = -1;
                ++i;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                break;  // trailing whitespace ends the SMILES
            } else if (is_ascii_alpha(c)) {
                parse_organic_atom();
            } else {
                fail(std::string("unknown symbol '") + c + "'", i);
            }
        }
        if (!branch_stack.empty()) fail("unbalanced '('", s.size());
        if (!rings.empty()) fail("unclosed ring bond", rings.begin()->second.pos);
        if (pending_order) fail("dangling bond symbol", pending_pos);
        if (mol.atoms.empty()) fail("empty SMILES", 0);
        return std::move(mol);
    }
};

char order_char(BondOrder o) {
    switch (o) {
        case BondOrder::Single: return '1';
        case BondOrder::Double: return '2';
        case BondOrder::Triple: return '3';
        case BondOrder::Aromatic: return 'a';
    }
    return '?';
}

}  // namespace

MolGraph parse_smiles(std::string_view smiles) {
    Parser p;
    p.s = smiles;
    return p.run();
}

std::string bond_key(const MolGraph& mol, const Bond& bond) {
    const std::string& ea = mol.atoms[static_cast<std::size_t>(bond.a)].element;
    const std::string& eb = mol.atoms[static_cast<std::size_t>(bond.b)].element;
    const std::string& lo = ea <= eb ? ea : eb;
    const std::string& hi = ea <= eb ? eb : ea;
    std::string key = lo;
    key += '-';
    key += hi;
    key += ':';
    key += order_char(bond.order);
    return key;
}

BondCountFeatures featurize_sum_over_bonds(const MolGraph& mol,
                                           const std::vector<std::string>& schema) {
    BondCountFeatures out;
    out.fv.schema = schema;
    out.fv.values.assign(schema.size(), 0.0);
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < schema.size(); ++k) index.emplace(schema[k], k);
    for (const auto& b : mol.bonds) {
        std::string key = bond_key(mol, b);
        auto it = index.find(key);
        if (it == index.end()) {
            ++out.unknown_bonds;
            ++out.unknown_keys[key];
        } else {
            out.fv.values[it->second] += 1.0;
        }
    }
    return out;
}

std::vector<std::string> bond_schema_from_molecules(const std::vector<MolGraph>& mols) {
    std::set<std::string> keys;
    for (const auto& mol : mols) {
        for (const auto& b : mol.bonds) keys.insert(bond_key(mol, b));
    }
    return std::vector<std::string>(keys.begin(), keys.end());
}

}  // namespace chemtext
