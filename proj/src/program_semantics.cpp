#include "sepkit/program_semantics.hpp"

#include <algorithm>

namespace sepkit {

namespace {

// The location index held by `var` if it addresses an allocated cell that
// holds a value, otherwise -1.
int valued_cell(const Universe& u, std::uint64_t st, std::uint32_t h, int var) {
    const int loc = u.location_index(u.get(st, var));
    if (loc < 0) {
        return -1;
    }
    const int s = u.cell_state(h, loc);
    return (s >= 1 && s <= u.base()) ? loc : -1;
}

void require_atomic(const Command& c) {
    if (!c.is_atomic()) {
        throw ConfigError("expected an atomic command, got " + to_string(c));
    }
}

} // namespace

bool step_atomic(const Command& c, const Universe& u, std::uint64_t st, std::uint32_t h,
                 const EmitFn& emit) {
    using K = Command::Kind;
    switch (c.kind) {
    case K::Assume:
        if (eval_bool(*c.b, u, st)) {
            emit(st, h);
        }
        return false;
    case K::Error:
        return true;
    case K::Assign:
        emit(u.set(st, u.require_var(c.x), eval_expr(*c.e, u, st)), h);
        return false;
    case K::Alloc: {
        const int x = u.require_var(c.x);
        for (int loc = 0; loc < u.num_locations(); ++loc) {
            const int s = u.cell_state(h, loc);
            if (s != 0 && s != u.dealloc_state()) {
                continue;
            }
            const std::uint64_t st2 = u.set(st, x, u.config().locations[static_cast<std::size_t>(loc)]);
            for (Value v : u.all_values()) {
                emit(st2, u.set_cell_state(h, loc, u.state_of_value(v)));
            }
        }
        return false;
    }
    case K::Free: {
        const int loc = valued_cell(u, st, h, u.require_var(c.x));
        if (loc < 0) {
            return true;
        }
        emit(st, u.set_cell_state(h, loc, u.config().model == Model::Two ? u.dealloc_state() : 0));
        return false;
    }
    case K::Load: {
        const int x = u.require_var(c.x);
        const int loc = valued_cell(u, st, h, u.require_var(c.y));
        if (loc < 0) {
            return true;
        }
        emit(u.set(st, x, u.value_of_digit(u.cell_state(h, loc) - 1)), h);
        return false;
    }
    case K::Store: {
        const int loc = valued_cell(u, st, h, u.require_var(c.x));
        const Value v = u.get(st, u.require_var(c.y));
        if (loc < 0) {
            return true;
        }
        emit(st, u.set_cell_state(h, loc, u.state_of_value(v)));
        return false;
    }
    default:
        require_atomic(c);
    }
    return false;
}

MemorySet step_atomic_sl(const Command& c, const MemorySet& p) {
    require_atomic(c);
    const UniversePtr& up = p.universe();
    const Universe& u = *up;
    MemorySet r(up);
    r.set_abort(p.includes_abort());
    const std::size_t wps = u.words_per_store();
    // Guards and assignments leave the heap alone, so whole per-store blocks
    // move at once.
    if (c.kind == Command::Kind::Assume || c.kind == Command::Kind::Assign) {
        const int x = c.kind == Command::Kind::Assign ? u.require_var(c.x) : -1;
        for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
            if (p.block_empty(st)) {
                continue;
            }
            std::uint64_t target = st;
            if (x >= 0) {
                target = u.set(st, x, eval_expr(*c.e, u, st));
            } else if (!eval_bool(*c.b, u, st)) {
                continue;
            }
            const std::uint64_t* src = p.block(st);
            std::uint64_t* dst = r.block(target);
            for (std::size_t w = 0; w < wps; ++w) {
                dst[w] |= src[w];
            }
        }
        return r;
    }
    bool abort = false;
    p.for_each([&](std::uint64_t st, std::uint32_t h) {
        abort |= step_atomic(c, u, st, h, [&](std::uint64_t s2, std::uint32_t h2) { r.set(s2, h2); });
    });
    if (abort) {
        r.set_abort(true);
    }
    return r;
}

TaggedMemorySet step_atomic_isl(const Command& c, const TaggedMemorySet& p) {
    require_atomic(c);
    const UniversePtr& up = p.universe();
    const Universe& u = *up;
    TaggedMemorySet r(MemorySet(up), p.er.without_abort());
    p.ok.for_each([&](std::uint64_t st, std::uint32_t h) {
        if (step_atomic(c, u, st, h, [&](std::uint64_t s2, std::uint32_t h2) { r.ok.set(s2, h2); })) {
            r.er.set(st, h);
        }
    });
    return r;
}

MemorySet run_forward(const Command& r, const MemorySet& p) {
    using K = Command::Kind;
    switch (r.kind) {
    case K::Seq:
        return run_forward(*r.c2, run_forward(*r.c1, p));
    case K::Choice:
        return run_forward(*r.c1, p) | run_forward(*r.c2, p);
    case K::Star: {
        MemorySet acc = p;
        MemorySet frontier = p;
        for (;;) {
            MemorySet next = run_forward(*r.c1, frontier);
            MemorySet fresh = next - acc;
            const bool new_abort = next.includes_abort() && !acc.includes_abort();
            fresh.set_abort(false);
            if (fresh.no_memories() && !new_abort) {
                return acc;
            }
            acc |= next;
            frontier = fresh;
        }
    }
    default:
        return step_atomic_sl(r, p);
    }
}

TaggedMemorySet run_forward(const Command& r, const TaggedMemorySet& p) {
    using K = Command::Kind;
    switch (r.kind) {
    case K::Seq:
        return run_forward(*r.c2, run_forward(*r.c1, p));
    case K::Choice: {
        TaggedMemorySet a = run_forward(*r.c1, p);
        a |= run_forward(*r.c2, p);
        return a;
    }
    case K::Star: {
        TaggedMemorySet acc = p;
        TaggedMemorySet frontier = p;
        for (;;) {
            TaggedMemorySet next = run_forward(*r.c1, TaggedMemorySet(frontier.ok, MemorySet(p.universe())));
            TaggedMemorySet fresh(next.ok - acc.ok, next.er - acc.er);
            if (fresh.ok.no_memories() && fresh.er.no_memories()) {
                return acc;
            }
            acc |= fresh;
            frontier = fresh;
        }
    }
    default:
        return step_atomic_isl(r, p);
    }
}

namespace {

MemorySet pre_atomic(const Command& c, const MemorySet& q) {
    const UniversePtr& up = q.universe();
    const Universe& u = *up;
    MemorySet r(up);
    // Guards and assignments leave the heap alone: whole blocks move.
    if (c.kind == Command::Kind::Assume || c.kind == Command::Kind::Assign) {
        const int x = c.kind == Command::Kind::Assign ? u.require_var(c.x) : -1;
        const std::size_t wps = u.words_per_store();
        for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
            std::uint64_t target = st;
            if (x >= 0) {
                target = u.set(st, x, eval_expr(*c.e, u, st));
            } else if (!eval_bool(*c.b, u, st)) {
                continue;
            }
            std::copy(q.block(target), q.block(target) + wps, r.block(st));
        }
        return r;
    }
    for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
        for (std::uint32_t h = 0; h < u.num_heaps(); ++h) {
            bool hit = false;
            step_atomic(c, u, st, h, [&](std::uint64_t s2, std::uint32_t h2) { hit |= q.test(s2, h2); });
            if (hit) {
                r.set(st, h);
            }
        }
    }
    return r;
}

} // namespace

MemorySet run_backward(const Command& r, const MemorySet& q0) {
    const MemorySet q = q0.without_abort();
    using K = Command::Kind;
    switch (r.kind) {
    case K::Seq:
        return run_backward(*r.c1, run_backward(*r.c2, q));
    case K::Choice:
        return run_backward(*r.c1, q) | run_backward(*r.c2, q);
    case K::Star: {
        MemorySet acc = q;
        for (;;) {
            MemorySet next = acc | run_backward(*r.c1, acc);
            if (next == acc) {
                return acc;
            }
            acc = std::move(next);
        }
    }
    default:
        require_atomic(r);
        return pre_atomic(r, q);
    }
}

} // namespace sepkit
