#include <doctest.h>

#include "sepkit/domain.hpp"

using namespace sepkit;

namespace {

UniversePtr default_universe(Model model = Model::One, bool reserved = false) {
    return make_universe(make_config(3, {1, 2}, {"x", "y"}, {}, model, reserved));
}

} // namespace

TEST_CASE("universe sizes follow from the value and cell-state counts") {
    // Four store digits per variable (0, 1, 2, null) over x y x' y'.
    const UniversePtr u1 = default_universe();
    CHECK(u1->num_stores() == 256);
    // A cell is absent or holds one of four values: 5 states per location.
    CHECK(u1->num_heaps() == 25);
    CHECK(u1->num_memories() == 6400);
    // Model 2 adds the deallocated state, reserved cells one more.
    CHECK(default_universe(Model::Two)->num_heaps() == 36);
    CHECK(default_universe(Model::Two, true)->num_heaps() == 49);
    CHECK(default_universe(Model::One)->dealloc_state() == -1);
}

TEST_CASE("configurations are validated") {
    DomainConfig cfg;
    cfg.locations = {3};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.locations = {1, 1};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.locations = {1};
    cfg.logical_vars = {"x'"};
    CHECK_THROWS_AS(cfg.validate(), ConfigError); // mirror of y missing
    cfg.logical_vars = {"x'", "y'"};
    CHECK_NOTHROW(cfg.validate());
    CHECK_THROWS_AS(make_universe(make_config(3, {1}, {"x'"}, {}, Model::One, false)), ConfigError);
}

TEST_CASE("make_config adds mirrors once") {
    const DomainConfig cfg = make_config(2, {1}, {"x"}, {"x'", "z'"}, Model::One, false);
    CHECK(cfg.logical_vars == std::vector<std::string>{"x'", "z'"});
}

TEST_CASE("stores and heaps round-trip through their numbering") {
    const UniversePtr u = default_universe(Model::Two);
    for (std::uint64_t st = 0; st < u->num_stores(); st += 7) {
        CHECK(u->encode_store(u->decode_store(st)) == st);
    }
    for (std::uint32_t h = 0; h < u->num_heaps(); ++h) {
        CHECK(u->encode_heap(u->decode_heap(h)) == h);
    }
    Heap h;
    h.cells = {Cell::val(kNull), Cell::dealloc()};
    CHECK(u->decode_heap(u->encode_heap(h)) == h);
    Heap bad;
    bad.cells = {Cell::dealloc(), Cell::absent()};
    CHECK_THROWS_AS(default_universe()->encode_heap(bad), ModelMismatch);
}

TEST_CASE("heap join requires disjoint domains") {
    Heap a{{Cell::val(0), Cell::absent()}};
    Heap b{{Cell::absent(), Cell::val(2)}};
    CHECK(heap_disjoint(a, b));
    CHECK(heap_join(a, b) == Heap{{Cell::val(0), Cell::val(2)}});
    CHECK_THROWS_AS(heap_join(a, a), NotDisjoint);
}

TEST_CASE("memory sets: algebra, abort flag and set_join") {
    const UniversePtr u = default_universe();
    MemorySet empty_heaps(u);
    for (std::uint64_t st = 0; st < u->num_stores(); ++st) {
        empty_heaps.set(st, 0);
    }
    const MemorySet all = MemorySet::all(u);
    CHECK(all.size() == 6400);
    CHECK(set_join(empty_heaps, all) == all);
    CHECK(set_join(all, all) == all); // every heap splits as h • empty

    MemorySet with_abort = empty_heaps;
    with_abort.set_abort(true);
    CHECK_FALSE(with_abort == empty_heaps);
    CHECK(empty_heaps.subset_of(with_abort));
    CHECK_FALSE(with_abort.subset_of(empty_heaps));
    CHECK((with_abort - empty_heaps).no_memories());
    CHECK((all - empty_heaps).size() == 6400 - 256);
}

TEST_CASE("exists_lift forgets a variable") {
    const UniversePtr u = default_universe();
    MemorySet one(u);
    one.set(0, 0); // every variable 0, empty heap
    const MemorySet lifted = exists_lift({"x'"}, one);
    CHECK(lifted.size() == 4); // x' ranges over 0, 1, 2, null
}
