"""Gateless spin-chain cellular automaton on an antiferromagnetic register.

The register is an alternating A,B,A,B... chain whose ground state is the
Neel pattern up,dn,up,dn (A-ground = up, B-ground = dn). A spin's RF
resonance depends on its sublattice and on the sum of its neighbors'
magnetic quantum numbers (A: ground +1/2, excited -1/2; B: ground -1/2,
excited +1/2), so a monochromatic pi pulse addresses exactly one
(sublattice, neighbor-sum) class. End sites have a single neighbor and
therefore half-integer sums, which is what makes boundary encoding
selective. All flips triggered by one pulse are simultaneous, evaluated
against the pre-pulse state.

Because a pulse on one sublattice only flips that sublattice while every
resonance class is determined by the other sublattice's spins, applying
the same pulse twice is always the identity.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .constants import A_OMEGA, GAMMA_P31

__all__ = [
    "EncodingBlocked",
    "InvalidPort",
    "Site",
    "ChainState",
    "PulseSpec",
    "ChainCouplings",
    "default_couplings",
    "resonance_frequency",
    "apply_pulse",
    "apply_program",
    "logical_patterns",
    "encode_logical",
    "encoding_program",
    "code_distance",
    "classify_window",
    "port_io",
    "program_to_text",
    "program_from_text",
    "control_unit_pattern",
    "place_control_unit",
    "spacer_count_is_odd",
    "chessboard_consistent",
]

NEIGHBOR_SUMS = (-1.0, -0.5, 0.0, 0.5, 1.0)

# serialization characters: ground up/dn, excited A (flipped dn), excited B
_CHAR_OF = {("A", False): "^", ("B", False): "v",
            ("A", True): "V", ("B", True): "W"}
_STATE_OF = {c: k for k, c in _CHAR_OF.items()}


class EncodingBlocked(RuntimeError):
    """No Table pulse sequence is selective for the requested encoding."""


class InvalidPort(ValueError):
    """Port operation addressed to a site without a dopant marker."""


@dataclass(frozen=True)
class Site:
    sublattice: str
    excited: bool = False
    dopant: bool = False

    def __post_init__(self):
        if self.sublattice not in ("A", "B"):
            raise ValueError("sublattice must be 'A' or 'B'")

    @property
    def m(self):
        """Magnetic quantum number of the nuclear spin."""
        base = 0.5 if self.sublattice == "A" else -0.5
        return -base if self.excited else base


@dataclass(frozen=True)
class ChainState:
    """Immutable chain of alternating-sublattice sites, A first."""

    sites: tuple

    def __post_init__(self):
        sites = tuple(self.sites)
        if len(sites) < 2:
            raise ValueError("chain needs at least two sites")
        for i, site in enumerate(sites):
            want = "A" if i % 2 == 0 else "B"
            if site.sublattice != want:
                raise ValueError("sublattices must alternate A,B,A,B,...")
        object.__setattr__(self, "sites", sites)

    @classmethod
    def ground(cls, n, dopants=()):
        marked = set(dopants)
        return cls(tuple(Site("A" if i % 2 == 0 else "B",
                              dopant=i in marked) for i in range(n)))

    @classmethod
    def from_string(cls, text):
        sites = []
        for c in text:
            if c == "*":
                if not sites:
                    raise ValueError("dopant marker before any site")
                last = sites[-1]
                sites[-1] = Site(last.sublattice, last.excited, True)
            elif c in _STATE_OF:
                sub, exc = _STATE_OF[c]
                sites.append(Site(sub, exc))
            else:
                raise ValueError("unknown site character %r" % c)
        return cls(tuple(sites))

    def to_string(self):
        return "".join(
            _CHAR_OF[(s.sublattice, s.excited)] + ("*" if s.dopant else "")
            for s in self.sites)

    def neighbor_sum(self, i):
        """Sum of adjacent spins' m; a single neighbor at the ends."""
        left = self.sites[i - 1].m if i > 0 else 0.0
        right = self.sites[i + 1].m if i + 1 < len(self.sites) else 0.0
        return left + right

    def excitation_count(self):
        return sum(1 for s in self.sites if s.excited)

    def net_m(self):
        return sum(s.m for s in self.sites)

    def _with_flips(self, indices):
        flips = set(indices)
        return ChainState(tuple(
            Site(s.sublattice, not s.excited if i in flips else s.excited,
                 s.dopant)
            for i, s in enumerate(self.sites)))


@dataclass(frozen=True)
class PulseSpec:
    """A monochromatic pi pulse addressing one resonance class."""

    sublattice: str
    neighbor_sum: float
    angle: float = math.pi

    def __post_init__(self):
        if self.sublattice not in ("A", "B"):
            raise ValueError("sublattice must be 'A' or 'B'")
        if self.neighbor_sum not in NEIGHBOR_SUMS:
            raise ValueError("neighbor_sum must be one of %s"
                             % (NEIGHBOR_SUMS,))
        if self.angle != math.pi:
            raise ValueError("only pi pulses are modeled")

    def to_text(self):
        frac = Fraction(self.neighbor_sum).limit_denominator(2)
        return "%s %s pi" % (self.sublattice, frac)


def program_to_text(pulses):
    return "\n".join(p.to_text() for p in pulses) + "\n"


def program_from_text(text):
    pulses = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        sub, frac, tail = line.split()
        if tail != "pi":
            raise ValueError("pulse line must end in 'pi': %r" % line)
        pulses.append(PulseSpec(sub, float(Fraction(frac))))
    return tuple(pulses)


@dataclass(frozen=True)
class ChainCouplings:
    """Frequency scales of the chain: contact, Zeeman, and neighbor terms.

    All angular frequencies (rad/s). Selectivity requires the neighbor
    coupling to split classes by less than their distance to any other
    class, which at construction is checked two ways: the scale ordering
    zeeman, hyperfine_a/2 > 10x spin_spin, and pairwise separation of all
    ten (sublattice, neighbor_sum) frequencies beyond the linewidth.
    """

    hyperfine_a: float
    zeeman: float
    spin_spin: float
    linewidth: float = 2.0 * math.pi * 0.05e6

    def __post_init__(self):
        if min(self.hyperfine_a, self.zeeman, self.spin_spin,
               self.linewidth) <= 0.0:
            raise ValueError("couplings must be positive")
        if self.zeeman / self.spin_spin <= 10.0 \
                or 0.5 * self.hyperfine_a / self.spin_spin <= 10.0:
            raise ValueError("neighbor coupling too strong for selectivity")
        classes = [("A", s) for s in NEIGHBOR_SUMS] \
            + [("B", s) for s in NEIGHBOR_SUMS]
        freqs = [resonance_frequency(self, sub, s) for sub, s in classes]
        for i in range(len(freqs)):
            for j in range(i + 1, len(freqs)):
                if abs(freqs[i] - freqs[j]) < self.linewidth:
                    raise ValueError(
                        "resonance collision between %s%+g and %s%+g"
                        % (classes[i] + classes[j]))


def default_couplings(b_field=1.0, spin_spin=2.0 * math.pi * 0.5e6):
    return ChainCouplings(hyperfine_a=A_OMEGA, zeeman=GAMMA_P31 * b_field,
                          spin_spin=spin_spin)


def resonance_frequency(couplings, sublattice, neighbor_sum):
    """|zeeman +- hyperfine_a/2 - spin_spin * neighbor_sum|, + on A."""
    sign = 1.0 if sublattice == "A" else -1.0
    return abs(couplings.zeeman + sign * 0.5 * couplings.hyperfine_a
               - couplings.spin_spin * neighbor_sum)


def apply_pulse(chain, pulse, couplings=None):
    """Flip every addressable site in the pulse's resonance class.

    Flips are simultaneous against the pre-pulse state. Dopant-marked
    sites sit at their own distinct frequency and never respond to a
    Table pulse. The couplings argument is accepted for symmetry with
    the frequency view of selectivity; class membership itself is purely
    combinatorial once the couplings passed their collision checks.
    """
    flips = [i for i, site in enumerate(chain.sites)
             if site.sublattice == pulse.sublattice
             and not site.dopant
             and chain.neighbor_sum(i) == pulse.neighbor_sum]
    return chain._with_flips(flips)


def apply_program(chain, pulses, couplings=None):
    for pulse in pulses:
        chain = apply_pulse(chain, pulse, couplings)
    return chain


def logical_patterns():
    """Four-site windows encoding the logical basis states."""
    return {0: "VW^v", 1: "^vVW"}


def encoding_program(bit):
    """Table-pulse sequence writing the given bit at the left boundary."""
    if bit == 0:
        return (PulseSpec("A", -0.5), PulseSpec("B", 0.0))
    if bit == 1:
        return (PulseSpec("A", -0.5), PulseSpec("B", 0.0),
                PulseSpec("A", 0.0), PulseSpec("B", 0.0),
                PulseSpec("B", -1.0), PulseSpec("A", -0.5))
    raise ValueError("bit must be 0 or 1")


def encode_logical(chain, position, bit):
    """Write a logical bit into the boundary window, returning the program.

    Only position 0 is addressable: every pulse in the programs relies on
    the half-integer end class for its selectivity, and the six leftmost
    sites must be unmarked ground spins so no other site shares a class
    with the intended targets.
    """
    program = encoding_program(bit)
    if position != 0:
        raise EncodingBlocked("only the boundary window is selective")
    guard = min(6, len(chain.sites))
    if len(chain.sites) < 6:
        raise EncodingBlocked("need at least six sites to encode")
    if any(s.excited or s.dopant for s in chain.sites[:guard]):
        raise EncodingBlocked("boundary window and guards must be ground")
    return apply_program(chain, program), program


def classify_window(window):
    """Logical bit of a 4-site window string, or None.

    A codeword has two excited spins forming a contiguous excited pair
    in sublattice order (A-excited then B-excited) and zero net m. Of
    the 16 window states, four have two excitations with zero net m but
    only the two displayed patterns also keep the pair contiguous and
    ordered.
    """
    patterns = logical_patterns()
    for bit, pattern in patterns.items():
        if window == pattern:
            return bit
    return None


def code_distance(window_a, window_b):
    """Single-spin flips separating two equal-length window strings."""
    if len(window_a) != len(window_b):
        raise ValueError("windows must have equal length")
    return sum(1 for a, b in zip(window_a, window_b) if a != b)


def port_io(chain, dopant_index, operation):
    """Act on a dopant port: write, read, or swap with its chain neighbor.

    The swap stands for the three-pulse selective exchange at the
    dopant's distinct frequency; here it transfers the excitation flag
    between the dopant and the adjacent register site (the right
    neighbor, or the left one at the right end).
    """
    sites = chain.sites
    if not 0 <= dopant_index < len(sites) \
            or not sites[dopant_index].dopant:
        raise InvalidPort("site %d is not a dopant port" % dopant_index)
    d = sites[dopant_index]
    if operation == "read":
        return "excited" if d.excited else "ground"
    if operation in ("write-ground", "write-excited"):
        want = operation == "write-excited"
        if want == d.excited:
            return chain
        return chain._with_flips([dopant_index])
    if operation in ("swap-in", "swap-out"):
        partner = dopant_index + 1 if dopant_index + 1 < len(sites) \
            else dopant_index - 1
        if sites[partner].excited == d.excited:
            return chain
        return chain._with_flips([dopant_index, partner])
    raise ValueError("unknown port operation %r" % operation)


def control_unit_pattern():
    """Six-spin control-unit preset, starting on a B site."""
    return "WVv^WV"


def place_control_unit(chain, start):
    """Imprint the control-unit pattern on six ground sites.

    The pattern starts on the B sublattice, so start must be odd; the
    spacer-parity constraint against other structures is checked
    separately with spacer_count_is_odd.
    """
    pattern = control_unit_pattern()
    if start % 2 != 1:
        raise ValueError("control unit must start on a B site")
    if start + len(pattern) > len(chain.sites):
        raise ValueError("control unit does not fit")
    flips = []
    for k, c in enumerate(pattern):
        site = chain.sites[start + k]
        if site.excited or site.dopant:
            raise ValueError("control unit region must be ground")
        sub, exc = _STATE_OF[c]
        if sub != site.sublattice:
            raise ValueError("control unit misaligned with sublattices")
        if exc:
            flips.append(start + k)
    return chain._with_flips(flips)


def spacer_count_is_odd(first_end, second_start):
    """True when an odd number of spacer spins separates two structures.

    first_end is the last index of the earlier structure, second_start
    the first index of the later one.
    """
    gap = second_start - first_end - 1
    if gap < 0:
        raise ValueError("structures overlap")
    return gap % 2 == 1


def chessboard_consistent(rows):
    """Check a 2-D pattern for checkerboard sublattice consistency.

    rows are strings of site characters; site (r, c) must belong to
    sublattice A when r + c is even and B otherwise.
    """
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            return False
        for c, ch in enumerate(row):
            if ch not in _STATE_OF:
                return False
            want = "A" if (r + c) % 2 == 0 else "B"
            if _STATE_OF[ch][0] != want:
                return False
    return True
