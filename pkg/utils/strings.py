"""
Action strings and the relations between them

An action is a small nonnegative integer; a string is a tuple of actions.
Enumeration code indexes the strings of one length in base |A|, first action
most significant, so appending `a` to index `i` gives `i * n + a` and
prepending gives `a * n**len + i`.
"""
from itertools import product
from typing import Iterator, Sequence, Tuple

Action = int
ActionString = Tuple[int, ...]

EMPTY: ActionString = ()


def concat(m: Sequence[int], n: Sequence[int]) -> ActionString:
    """Return M ⊕ N"""
    return tuple(m) + tuple(n)


def is_prefix(m: Sequence[int], n: Sequence[int]) -> bool:
    """True iff N = M ⊕ L for some string L"""
    m, n = tuple(m), tuple(n)
    return len(m) <= len(n) and n[:len(m)] == m


def is_subsequence(m: Sequence[int], n: Sequence[int]) -> bool:
    """True iff M is obtained from N by deleting elements, keeping order"""
    remaining = iter(n)
    return all(any(x == y for y in remaining) for x in m)


def format_string(s: Sequence[int]) -> str:
    """Comma-joined action ids; the empty string formats as ''"""
    return ",".join(str(a) for a in s)


def parse_string(text: str) -> ActionString:
    """Inverse of format_string"""
    text = text.strip()
    if not text:
        return EMPTY
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"Invalid action string: {text!r}")


def validate_string(s: Sequence[int], num_actions: int) -> ActionString:
    """Return s as a tuple, raising ValueError on an out-of-range action"""
    s = tuple(int(a) for a in s)
    bad = [a for a in s if a < 0 or a >= num_actions]
    if bad:
        raise ValueError(f"Actions {bad} outside 0..{num_actions - 1}")
    return s


def string_index(s: Sequence[int], num_actions: int) -> int:
    """Position of s among the strings of its length"""
    idx = 0
    for a in s:
        idx = idx * num_actions + a
    return idx


def decode_index(idx: int, length: int, num_actions: int) -> ActionString:
    """Inverse of string_index"""
    out = []
    for _ in range(length):
        idx, a = divmod(idx, num_actions)
        out.append(a)
    return tuple(reversed(out))


def iter_strings(num_actions: int, length: int) -> Iterator[ActionString]:
    """All strings of one length, in index order"""
    return product(range(num_actions), repeat=length)


def count_strings(num_actions: int, max_len: int, min_len: int = 0) -> int:
    """Number of strings with min_len <= length <= max_len"""
    return sum(num_actions ** length for length in range(min_len, max_len + 1))
