#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemtext {

enum class BondOrder { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Atom {
    std::string element;  // canonical symbol, e.g. "C", "Cl"
    bool aromatic = false;
    int charge = 0;
};

struct Bond {
    int a = 0;
    int b = 0;
    BondOrder order = BondOrder::Single;
};

struct MolGraph {
    std::vector<Atom> atoms;
    std::vector<Bond> bonds;
};

struct SmilesError : std::runtime_error {
    SmilesError(const std::string& msg, std::size_t pos);
    std::size_t position;
};

// Parses the working subset of SMILES: organic-subset atoms, bracket atoms
// with charges, bond orders - = # :, aromatic lowercase atoms, branches,
// ring closures (digits and %nn) and '.' disconnections. No stereochemistry,
// no isotopes, no implicit-hydrogen bookkeeping.
MolGraph parse_smiles(std::string_view smiles);

// Bond-type key "ElemA-ElemB:order" with elements sorted alphabetically;
// order is 1, 2, 3 or 'a' for aromatic.
std::string bond_key(const MolGraph& mol, const Bond& bond);

struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> schema;
};

struct BondCountFeatures {
    FeatureVector fv;
    int unknown_bonds = 0;                  // bonds whose key is not in the schema
    std::map<std::string, int> unknown_keys;
};

// Sum-over-bonds featurization: counts each bond under its type key.
BondCountFeatures featurize_sum_over_bonds(const MolGraph& mol,
                                           const std::vector<std::string>& schema);

// Sorted union of bond keys over a molecule collection; fixes the feature
// schema at training time.
std::vector<std::string> bond_schema_from_molecules(const std::vector<MolGraph>& mols);

}  // namespace chemtext
