#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sepkit/errors.hpp"

namespace sepkit {

// Values are the integers {0..n-1} plus a distinguished null.
using Value = int;
inline constexpr Value kNull = -1;

enum class Model { One, Two };

std::string value_to_string(Value v);

// The finite universe every enumeration ranges over.
struct DomainConfig {
    int num_values = 3;                      // integers {0..num_values-1}; null is implicit
    std::vector<Value> locations{1, 2};      // subset of the integers
    std::vector<std::string> program_vars{"x", "y"};
    std::vector<std::string> logical_vars{"x'", "y'"};
    Model model = Model::One;
    bool reserved_enabled = false;

    // Throws ConfigError when an invariant fails.
    void validate() const;

    static std::string mirror(const std::string& program_var) { return program_var + "'"; }
    static bool is_logical_name(const std::string& name) {
        return !name.empty() && name.back() == '\'';
    }

    bool is_program_var(const std::string& name) const;
    bool is_logical_var(const std::string& name) const;
};

// Configuration with the given program variables, their mirrors and the
// extra logical variables (duplicates and mirrors are skipped).
DomainConfig make_config(int num_values, std::vector<Value> locations,
                         std::vector<std::string> program_vars,
                         const std::vector<std::string>& extra_logical, Model model,
                         bool reserved_enabled);

// ---------------------------------------------------------------------------
// Heaps

enum class CellKind : std::uint8_t { Absent, Val, Dealloc, Reserved };

struct Cell {
    CellKind kind = CellKind::Absent;
    Value value = 0; // meaningful only for CellKind::Val

    static Cell absent() { return {}; }
    static Cell val(Value v) { return {CellKind::Val, v}; }
    static Cell dealloc() { return {CellKind::Dealloc, 0}; }
    static Cell reserved() { return {CellKind::Reserved, 0}; }

    bool operator==(const Cell& o) const {
        return kind == o.kind && (kind != CellKind::Val || value == o.value);
    }
};

// A heap is a map from configured locations to cells; `cells[i]` describes
// `cfg.locations[i]`.  Absent cells are outside the domain.
struct Heap {
    std::vector<Cell> cells;
    bool operator==(const Heap& o) const { return cells == o.cells; }
};

bool heap_disjoint(const Heap& h1, const Heap& h2);
// Throws NotDisjoint when the domains overlap.
Heap heap_join(const Heap& h1, const Heap& h2);

// Store over all configured variables, program variables first, indexed as
// in Universe::vars().
struct Store {
    std::vector<Value> values;
    bool operator==(const Store& o) const { return values == o.values; }
};

struct Memory {
    Store store;
    Heap heap;
    bool operator==(const Memory& o) const { return store == o.store && heap == o.heap; }
};

// ---------------------------------------------------------------------------
// Universe: a dense numbering of every memory of a configuration.
//
// Stores are numbered in mixed radix over the variables (one digit per
// variable, digit n standing for null).  Heaps are numbered in mixed radix
// over the locations, digit 0 meaning "absent", so the join of two disjoint
// heaps is simply the sum of their indices.

class Universe {
  public:
    explicit Universe(DomainConfig cfg);

    const DomainConfig& config() const { return cfg_; }
    const std::vector<std::string>& vars() const { return vars_; }
    int var_index(const std::string& name) const; // -1 when unknown
    int require_var(const std::string& name) const; // throws ConfigError
    int num_program_vars() const { return static_cast<int>(cfg_.program_vars.size()); }

    int base() const { return base_; }
    std::uint64_t num_stores() const { return num_stores_; }
    std::uint32_t num_heaps() const { return num_heaps_; }
    std::size_t words_per_store() const { return words_per_store_; }
    std::uint64_t num_memories() const { return num_stores_ * num_heaps_; }

    // Values in enumeration order (0..n-1 then null).
    const std::vector<Value>& all_values() const { return all_values_; }
    int digit_of(Value v) const { return v == kNull ? base_ - 1 : v; }
    Value value_of_digit(int d) const { return d == base_ - 1 ? kNull : d; }
    bool valid_value(Value v) const { return v == kNull || (v >= 0 && v < cfg_.num_values); }

    Value get(std::uint64_t store, int var) const {
        return value_of_digit(static_cast<int>((store / var_pow_[var]) % base_));
    }
    std::uint64_t set(std::uint64_t store, int var, Value v) const {
        const std::uint64_t old = (store / var_pow_[var]) % base_;
        return store + (static_cast<std::uint64_t>(digit_of(v)) - old) * var_pow_[var];
    }
    std::uint64_t var_stride(int var) const { return var_pow_[var]; }

    int num_locations() const { return static_cast<int>(cfg_.locations.size()); }
    int location_index(Value v) const; // -1 if v is not a location

    // Cell-state digits: 0 absent, 1..base value, then ⊥ (model 2), then ⊠.
    int cell_states() const { return cell_states_; }
    int dealloc_state() const { return dealloc_state_; }   // -1 if unavailable
    int reserved_state() const { return reserved_state_; } // -1 if unavailable
    int state_of_value(Value v) const { return 1 + digit_of(v); }
    int cell_state(std::uint32_t heap, int loc) const {
        return static_cast<int>((heap / loc_pow_[loc]) % cell_states_);
    }
    std::uint32_t set_cell_state(std::uint32_t heap, int loc, int state) const {
        const std::uint32_t old = (heap / loc_pow_[loc]) % cell_states_;
        return heap + (static_cast<std::uint32_t>(state) - old) * loc_pow_[loc];
    }
    std::uint32_t heap_domain(std::uint32_t heap) const { return heap_domain_[heap]; }
    std::uint32_t single_cell_heap(int loc, int state) const {
        return static_cast<std::uint32_t>(state) * loc_pow_[loc];
    }

    Cell cell_of_state(int state) const;
    int state_of_cell(const Cell& c) const; // throws ModelMismatch if illegal

    Store decode_store(std::uint64_t store) const;
    std::uint64_t encode_store(const Store& s) const;
    Heap decode_heap(std::uint32_t heap) const;
    std::uint32_t encode_heap(const Heap& h) const;

  private:
    DomainConfig cfg_;
    std::vector<std::string> vars_;
    std::unordered_map<std::string, int> var_index_;
    int base_;
    std::vector<std::uint64_t> var_pow_;
    std::uint64_t num_stores_;
    std::vector<Value> all_values_;
    int cell_states_;
    int dealloc_state_;
    int reserved_state_;
    std::vector<std::uint32_t> loc_pow_;
    std::uint32_t num_heaps_;
    std::vector<std::uint32_t> heap_domain_;
    std::size_t words_per_store_;
};

using UniversePtr = std::shared_ptr<const Universe>;

UniversePtr make_universe(const DomainConfig& cfg);

// ---------------------------------------------------------------------------
// MemorySet: a bitset over the memories of a universe, plus the abort flag
// used by the abort-propagating forward semantics.

class MemorySet {
  public:
    explicit MemorySet(UniversePtr u);
    static MemorySet all(UniversePtr u);

    const UniversePtr& universe() const { return u_; }

    bool includes_abort() const { return abort_; }
    void set_abort(bool a) { abort_ = a; }

    bool test(std::uint64_t store, std::uint32_t heap) const {
        const std::size_t w = store * wps_ + heap / 64;
        return (bits_[w] >> (heap % 64)) & 1U;
    }
    void set(std::uint64_t store, std::uint32_t heap) {
        bits_[store * wps_ + heap / 64] |= std::uint64_t{1} << (heap % 64);
    }
    const std::uint64_t* block(std::uint64_t store) const { return bits_.data() + store * wps_; }
    std::uint64_t* block(std::uint64_t store) { return bits_.data() + store * wps_; }
    bool block_empty(std::uint64_t store) const;
    void fill_block(std::uint64_t store); // every heap for this store

    bool contains(const Memory& m) const;
    void insert(const Memory& m);

    // Set algebra on the memory part; the abort flag is combined likewise.
    MemorySet& operator|=(const MemorySet& o);
    MemorySet& operator&=(const MemorySet& o);
    MemorySet& operator-=(const MemorySet& o);
    friend MemorySet operator|(MemorySet a, const MemorySet& b) { return a |= b; }
    friend MemorySet operator&(MemorySet a, const MemorySet& b) { return a &= b; }
    friend MemorySet operator-(MemorySet a, const MemorySet& b) { return a -= b; }

    // Equality and inclusion compare memories and the abort flag.
    bool operator==(const MemorySet& o) const;
    bool subset_of(const MemorySet& o) const;
    bool intersects(const MemorySet& o) const; // memories only
    bool empty() const;                        // no memories and no abort
    bool no_memories() const;
    std::size_t size() const; // number of memories (abort not counted)

    MemorySet without_abort() const {
        MemorySet r = *this;
        r.abort_ = false;
        return r;
    }

    void for_each(const std::function<void(std::uint64_t, std::uint32_t)>& f) const;
    std::vector<Memory> members() const;

    std::size_t hash() const;

  private:
    void check_same(const MemorySet& o) const;

    UniversePtr u_;
    std::size_t wps_;
    std::vector<std::uint64_t> bits_;
    bool abort_ = false;
};

enum class Tag { Ok, Er };

struct TaggedMemorySet {
    MemorySet ok;
    MemorySet er;

    explicit TaggedMemorySet(UniversePtr u) : ok(u), er(u) {}
    TaggedMemorySet(MemorySet o, MemorySet e) : ok(std::move(o)), er(std::move(e)) {}
    const UniversePtr& universe() const { return ok.universe(); }

    TaggedMemorySet& operator|=(const TaggedMemorySet& o) {
        ok |= o.ok;
        er |= o.er;
        return *this;
    }
    bool operator==(const TaggedMemorySet& o) const { return ok == o.ok && er == o.er; }
    bool subset_of(const TaggedMemorySet& o) const { return ok.subset_of(o.ok) && er.subset_of(o.er); }
    bool empty() const { return ok.empty() && er.empty(); }
};

// { (s, hp•hq) | (s,hp) ∈ P, (s,hq) ∈ Q, hp # hq }.
MemorySet set_join(const MemorySet& p, const MemorySet& q);

// Closes P under arbitrary reassignment of the variables in X.
MemorySet exists_lift(const std::vector<std::string>& xs, const MemorySet& p);

std::string memory_to_string(const Universe& u, const Memory& m);
std::string memory_set_to_string(const MemorySet& s, std::size_t limit = 64);

} // namespace sepkit
