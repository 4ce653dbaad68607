#pragma once

#include <cstdint>
#include <functional>

#include "sepkit/domain.hpp"
#include "sepkit/syntax.hpp"

namespace sepkit {

enum class SemanticsKind { ForwardSl, ForwardIsl, BackwardSl };

// Successors of one memory under an atomic command.  `emit` receives every
// non-faulting successor; the return value reports whether the step faults
// (abort under the SL reading, an er-state equal to the input under the ISL
// reading).  error() faults; accessing an absent location, a non-location,
// a deallocated or a reserved cell faults.  alloc picks an absent (or, under
// model 2, deallocated) location and any value; when none is free it has no
// successor.
using EmitFn = std::function<void(std::uint64_t store, std::uint32_t heap)>;
bool step_atomic(const Command& c, const Universe& u, std::uint64_t store, std::uint32_t heap,
                 const EmitFn& emit);

// Abort-propagating forward semantics on sets.  Throws ConfigError on
// non-atomic commands.
MemorySet step_atomic_sl(const Command& c, const MemorySet& p);
// ok/er tagging forward semantics; er states pass through unchanged and
// error() moves ok states to er.
TaggedMemorySet step_atomic_isl(const Command& c, const TaggedMemorySet& p);

MemorySet run_forward(const Command& r, const MemorySet& p);
TaggedMemorySet run_forward(const Command& r, const TaggedMemorySet& p);

// { m | run_forward(r, {m}) ∩ Q ≠ ∅ }, abort never counting as a hit.
MemorySet run_backward(const Command& r, const MemorySet& q);

} // namespace sepkit
