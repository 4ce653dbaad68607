#include "sepkit/domain.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace sepkit {

std::string value_to_string(Value v) { return v == kNull ? "null" : std::to_string(v); }

bool DomainConfig::is_program_var(const std::string& name) const {
    return std::find(program_vars.begin(), program_vars.end(), name) != program_vars.end();
}

bool DomainConfig::is_logical_var(const std::string& name) const {
    return std::find(logical_vars.begin(), logical_vars.end(), name) != logical_vars.end();
}

void DomainConfig::validate() const {
    if (num_values < 1) {
        throw ConfigError("at least one integer value is required");
    }
    std::set<Value> seen_locs;
    for (Value l : locations) {
        if (l == kNull || l < 0 || l >= num_values) {
            throw ConfigError("location " + value_to_string(l) + " is not a configured value");
        }
        if (!seen_locs.insert(l).second) {
            throw ConfigError("duplicate location " + std::to_string(l));
        }
    }
    std::set<std::string> names;
    for (const auto& x : program_vars) {
        if (x.empty() || is_logical_name(x)) {
            throw ConfigError("program variable '" + x + "' must be a non-empty unprimed name");
        }
        if (!names.insert(x).second) {
            throw ConfigError("duplicate variable '" + x + "'");
        }
    }
    for (const auto& x : logical_vars) {
        if (!is_logical_name(x)) {
            throw ConfigError("logical variable '" + x + "' must be primed");
        }
        if (!names.insert(x).second) {
            throw ConfigError("duplicate variable '" + x + "'");
        }
    }
    for (const auto& x : program_vars) {
        if (!is_logical_var(mirror(x))) {
            throw ConfigError("mirror " + mirror(x) + " of program variable " + x + " is missing");
        }
    }
    if (locations.size() > 8) {
        throw ConfigError("at most 8 locations are supported");
    }
}

DomainConfig make_config(int num_values, std::vector<Value> locations,
                         std::vector<std::string> program_vars,
                         const std::vector<std::string>& extra_logical, Model model,
                         bool reserved_enabled) {
    DomainConfig cfg;
    cfg.num_values = num_values;
    cfg.locations = std::move(locations);
    cfg.program_vars = std::move(program_vars);
    cfg.logical_vars.clear();
    for (const auto& x : cfg.program_vars) {
        cfg.logical_vars.push_back(DomainConfig::mirror(x));
    }
    for (const auto& x : extra_logical) {
        if (!cfg.is_logical_var(x)) {
            cfg.logical_vars.push_back(x);
        }
    }
    cfg.model = model;
    cfg.reserved_enabled = reserved_enabled;
    return cfg;
}

// ---------------------------------------------------------------------------

bool heap_disjoint(const Heap& h1, const Heap& h2) {
    const std::size_t n = std::min(h1.cells.size(), h2.cells.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (h1.cells[i].kind != CellKind::Absent && h2.cells[i].kind != CellKind::Absent) {
            return false;
        }
    }
    return true;
}

Heap heap_join(const Heap& h1, const Heap& h2) {
    if (!heap_disjoint(h1, h2)) {
        throw NotDisjoint("heaps share a location");
    }
    Heap r;
    r.cells.resize(std::max(h1.cells.size(), h2.cells.size()));
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        if (i < h1.cells.size() && h1.cells[i].kind != CellKind::Absent) {
            r.cells[i] = h1.cells[i];
        } else if (i < h2.cells.size()) {
            r.cells[i] = h2.cells[i];
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

Universe::Universe(DomainConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    vars_ = cfg_.program_vars;
    vars_.insert(vars_.end(), cfg_.logical_vars.begin(), cfg_.logical_vars.end());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        var_index_[vars_[i]] = static_cast<int>(i);
    }
    base_ = cfg_.num_values + 1;
    for (int d = 0; d < base_; ++d) {
        all_values_.push_back(d == base_ - 1 ? kNull : d);
    }

    constexpr std::uint64_t kMaxBits = std::uint64_t{1} << 33;
    num_stores_ = 1;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        var_pow_.push_back(num_stores_);
        if (num_stores_ > kMaxBits / static_cast<std::uint64_t>(base_)) {
            throw ConfigError("configuration too large to enumerate (" +
                              std::to_string(vars_.size()) + " variables)");
        }
        num_stores_ *= static_cast<std::uint64_t>(base_);
    }

    cell_states_ = 1 + base_;
    dealloc_state_ = -1;
    reserved_state_ = -1;
    if (cfg_.model == Model::Two) {
        dealloc_state_ = cell_states_++;
    }
    if (cfg_.reserved_enabled) {
        reserved_state_ = cell_states_++;
    }
    std::uint64_t heaps = 1;
    for (std::size_t i = 0; i < cfg_.locations.size(); ++i) {
        loc_pow_.push_back(static_cast<std::uint32_t>(heaps));
        heaps *= static_cast<std::uint64_t>(cell_states_);
        if (heaps > (std::uint64_t{1} << 24)) {
            throw ConfigError("too many heaps to enumerate");
        }
    }
    num_heaps_ = static_cast<std::uint32_t>(heaps);
    heap_domain_.resize(num_heaps_);
    for (std::uint32_t h = 0; h < num_heaps_; ++h) {
        std::uint32_t mask = 0;
        for (int l = 0; l < num_locations(); ++l) {
            if (cell_state(h, l) != 0) {
                mask |= 1U << l;
            }
        }
        heap_domain_[h] = mask;
    }
    words_per_store_ = (num_heaps_ + 63) / 64;
    if (num_stores_ * words_per_store_ * 64 > kMaxBits) {
        throw ConfigError("configuration too large to enumerate (" +
                          std::to_string(num_stores_) + " stores x " + std::to_string(num_heaps_) +
                          " heaps)");
    }
}

int Universe::var_index(const std::string& name) const {
    auto it = var_index_.find(name);
    return it == var_index_.end() ? -1 : it->second;
}

int Universe::require_var(const std::string& name) const {
    const int i = var_index(name);
    if (i < 0) {
        throw ConfigError("variable '" + name + "' is not configured");
    }
    return i;
}

int Universe::location_index(Value v) const {
    for (std::size_t i = 0; i < cfg_.locations.size(); ++i) {
        if (cfg_.locations[i] == v) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

Cell Universe::cell_of_state(int state) const {
    if (state == 0) {
        return Cell::absent();
    }
    if (state == dealloc_state_) {
        return Cell::dealloc();
    }
    if (state == reserved_state_) {
        return Cell::reserved();
    }
    return Cell::val(value_of_digit(state - 1));
}

int Universe::state_of_cell(const Cell& c) const {
    switch (c.kind) {
    case CellKind::Absent:
        return 0;
    case CellKind::Val:
        if (!valid_value(c.value)) {
            throw ConfigError("cell value " + value_to_string(c.value) + " out of range");
        }
        return state_of_value(c.value);
    case CellKind::Dealloc:
        if (dealloc_state_ < 0) {
            throw ModelMismatch("deallocated cells require memory model 2");
        }
        return dealloc_state_;
    case CellKind::Reserved:
        if (reserved_state_ < 0) {
            throw ModelMismatch("reserved cells are not enabled");
        }
        return reserved_state_;
    }
    return 0;
}

Store Universe::decode_store(std::uint64_t store) const {
    Store s;
    s.values.resize(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        s.values[i] = get(store, static_cast<int>(i));
    }
    return s;
}

std::uint64_t Universe::encode_store(const Store& s) const {
    if (s.values.size() != vars_.size()) {
        throw ConfigError("store does not cover the configured variables");
    }
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (!valid_value(s.values[i])) {
            throw ConfigError("store value out of range");
        }
        idx += static_cast<std::uint64_t>(digit_of(s.values[i])) * var_pow_[i];
    }
    return idx;
}

Heap Universe::decode_heap(std::uint32_t heap) const {
    Heap h;
    h.cells.resize(cfg_.locations.size());
    for (int l = 0; l < num_locations(); ++l) {
        h.cells[l] = cell_of_state(cell_state(heap, l));
    }
    return h;
}

std::uint32_t Universe::encode_heap(const Heap& h) const {
    if (h.cells.size() != cfg_.locations.size()) {
        throw ConfigError("heap does not match the configured locations");
    }
    std::uint32_t idx = 0;
    for (int l = 0; l < num_locations(); ++l) {
        idx += static_cast<std::uint32_t>(state_of_cell(h.cells[l])) * loc_pow_[l];
    }
    return idx;
}

UniversePtr make_universe(const DomainConfig& cfg) { return std::make_shared<const Universe>(cfg); }

// ---------------------------------------------------------------------------

MemorySet::MemorySet(UniversePtr u)
    : u_(std::move(u)), wps_(u_->words_per_store()), bits_(u_->num_stores() * wps_, 0) {}

MemorySet MemorySet::all(UniversePtr u) {
    MemorySet s(std::move(u));
    for (std::uint64_t st = 0; st < s.u_->num_stores(); ++st) {
        s.fill_block(st);
    }
    return s;
}

bool MemorySet::block_empty(std::uint64_t store) const {
    const std::uint64_t* b = block(store);
    for (std::size_t i = 0; i < wps_; ++i) {
        if (b[i] != 0) {
            return false;
        }
    }
    return true;
}

void MemorySet::fill_block(std::uint64_t store) {
    std::uint64_t* b = block(store);
    const std::uint32_t n = u_->num_heaps();
    for (std::size_t i = 0; i < wps_; ++i) {
        const std::uint64_t lo = i * 64;
        if (lo + 64 <= n) {
            b[i] = ~std::uint64_t{0};
        } else {
            b[i] = (std::uint64_t{1} << (n - lo)) - 1;
        }
    }
}

bool MemorySet::contains(const Memory& m) const {
    return test(u_->encode_store(m.store), u_->encode_heap(m.heap));
}

void MemorySet::insert(const Memory& m) { set(u_->encode_store(m.store), u_->encode_heap(m.heap)); }

void MemorySet::check_same(const MemorySet& o) const {
    if (u_ != o.u_ && !(u_->num_stores() == o.u_->num_stores() &&
                        u_->num_heaps() == o.u_->num_heaps() && u_->vars() == o.u_->vars())) {
        throw ConfigError("memory sets belong to different configurations");
    }
}

MemorySet& MemorySet::operator|=(const MemorySet& o) {
    check_same(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        bits_[i] |= o.bits_[i];
    }
    abort_ = abort_ || o.abort_;
    return *this;
}

MemorySet& MemorySet::operator&=(const MemorySet& o) {
    check_same(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        bits_[i] &= o.bits_[i];
    }
    abort_ = abort_ && o.abort_;
    return *this;
}

MemorySet& MemorySet::operator-=(const MemorySet& o) {
    check_same(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        bits_[i] &= ~o.bits_[i];
    }
    abort_ = abort_ && !o.abort_;
    return *this;
}

bool MemorySet::operator==(const MemorySet& o) const {
    check_same(o);
    return abort_ == o.abort_ && bits_ == o.bits_;
}

bool MemorySet::subset_of(const MemorySet& o) const {
    check_same(o);
    if (abort_ && !o.abort_) {
        return false;
    }
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if ((bits_[i] & ~o.bits_[i]) != 0) {
            return false;
        }
    }
    return true;
}

bool MemorySet::intersects(const MemorySet& o) const {
    check_same(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if ((bits_[i] & o.bits_[i]) != 0) {
            return true;
        }
    }
    return false;
}

bool MemorySet::no_memories() const {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint64_t w) { return w == 0; });
}

bool MemorySet::empty() const { return !abort_ && no_memories(); }

std::size_t MemorySet::size() const {
    std::size_t n = 0;
    for (std::uint64_t w : bits_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

void MemorySet::for_each(const std::function<void(std::uint64_t, std::uint32_t)>& f) const {
    for (std::uint64_t st = 0; st < u_->num_stores(); ++st) {
        const std::uint64_t* b = block(st);
        for (std::size_t w = 0; w < wps_; ++w) {
            std::uint64_t word = b[w];
            while (word != 0) {
                const int bit = std::countr_zero(word);
                word &= word - 1;
                f(st, static_cast<std::uint32_t>(w * 64 + bit));
            }
        }
    }
}

std::vector<Memory> MemorySet::members() const {
    std::vector<Memory> out;
    for_each([&](std::uint64_t st, std::uint32_t h) {
        out.push_back(Memory{u_->decode_store(st), u_->decode_heap(h)});
    });
    return out;
}

std::size_t MemorySet::hash() const {
    std::size_t h = abort_ ? 0x9e3779b97f4a7c15ULL : 0;
    for (std::uint64_t w : bits_) {
        h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------------------

namespace {

// Join of every heap of block `a` with every disjoint heap of block `b`.
void join_blocks(const Universe& u, const std::uint64_t* a, const std::uint64_t* b,
                 std::uint64_t* out) {
    const std::size_t wps = u.words_per_store();
    std::vector<std::uint32_t> hb;
    for (std::size_t w = 0; w < wps; ++w) {
        std::uint64_t word = b[w];
        while (word != 0) {
            const int bit = std::countr_zero(word);
            word &= word - 1;
            hb.push_back(static_cast<std::uint32_t>(w * 64 + bit));
        }
    }
    for (std::size_t w = 0; w < wps; ++w) {
        std::uint64_t word = a[w];
        while (word != 0) {
            const int bit = std::countr_zero(word);
            word &= word - 1;
            const auto ha = static_cast<std::uint32_t>(w * 64 + bit);
            const std::uint32_t da = u.heap_domain(ha);
            for (std::uint32_t h2 : hb) {
                if ((da & u.heap_domain(h2)) == 0) {
                    const std::uint32_t j = ha + h2;
                    out[j / 64] |= std::uint64_t{1} << (j % 64);
                }
            }
        }
    }
}

struct BlockPairHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::size_t h = 0;
        for (std::uint64_t w : v) {
            h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace

MemorySet set_join(const MemorySet& p, const MemorySet& q) {
    const Universe& u = *p.universe();
    MemorySet r(p.universe());
    const std::size_t wps = u.words_per_store();
    // Many stores share the same pair of heap blocks; memoize per pair.
    std::unordered_map<std::vector<std::uint64_t>, std::vector<std::uint64_t>, BlockPairHash> memo;
    std::vector<std::uint64_t> key(2 * wps);
    for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
        if (p.block_empty(st) || q.block_empty(st)) {
            continue;
        }
        std::copy(p.block(st), p.block(st) + wps, key.begin());
        std::copy(q.block(st), q.block(st) + wps, key.begin() + static_cast<std::ptrdiff_t>(wps));
        auto it = memo.find(key);
        if (it == memo.end()) {
            std::vector<std::uint64_t> out(wps, 0);
            join_blocks(u, p.block(st), q.block(st), out.data());
            it = memo.emplace(key, std::move(out)).first;
        }
        std::copy(it->second.begin(), it->second.end(), r.block(st));
    }
    return r;
}

MemorySet exists_lift(const std::vector<std::string>& xs, const MemorySet& p) {
    const Universe& u = *p.universe();
    MemorySet r = p;
    const std::size_t wps = u.words_per_store();
    std::vector<std::uint64_t> acc(wps);
    for (const auto& x : xs) {
        const int v = u.require_var(x);
        const std::uint64_t stride = u.var_stride(v);
        const auto base = static_cast<std::uint64_t>(u.base());
        for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
            if ((st / stride) % base != 0) {
                continue;
            }
            std::fill(acc.begin(), acc.end(), 0);
            for (std::uint64_t k = 0; k < base; ++k) {
                const std::uint64_t* b = r.block(st + k * stride);
                for (std::size_t w = 0; w < wps; ++w) {
                    acc[w] |= b[w];
                }
            }
            for (std::uint64_t k = 0; k < base; ++k) {
                std::copy(acc.begin(), acc.end(), r.block(st + k * stride));
            }
        }
    }
    return r;
}

std::string memory_to_string(const Universe& u, const Memory& m) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < u.vars().size(); ++i) {
        os << (i ? " " : "") << u.vars()[i] << "=" << value_to_string(m.store.values[i]);
    }
    os << " | [";
    bool first = true;
    for (int l = 0; l < u.num_locations(); ++l) {
        const Cell& c = m.heap.cells[l];
        if (c.kind == CellKind::Absent) {
            continue;
        }
        os << (first ? "" : ", ") << u.config().locations[l] << "->";
        first = false;
        switch (c.kind) {
        case CellKind::Val:
            os << value_to_string(c.value);
            break;
        case CellKind::Dealloc:
            os << "dealloc";
            break;
        case CellKind::Reserved:
            os << "reserved";
            break;
        case CellKind::Absent:
            break;
        }
    }
    os << "])";
    return os.str();
}

std::string memory_set_to_string(const MemorySet& s, std::size_t limit) {
    std::ostringstream os;
    std::size_t n = 0;
    const Universe& u = *s.universe();
    s.for_each([&](std::uint64_t st, std::uint32_t h) {
        if (n < limit) {
            os << memory_to_string(u, Memory{u.decode_store(st), u.decode_heap(h)}) << "\n";
        }
        ++n;
    });
    if (n > limit) {
        os << "... (" << n - limit << " more)\n";
    }
    if (s.includes_abort()) {
        os << "abort\n";
    }
    return os.str();
}

} // namespace sepkit
