"""Shared test helpers: independent oracles and random generators."""

from __future__ import annotations

import random
from itertools import permutations

from pastekit.ogposet import El, GrSet, OgPoset, boundary, build_ogposet, check_map, closure


def enumerate_maps(source, target):
    """All total valid maps source -> target, by exhaustive extension.

    Assigns images in (dim, pos) order; a candidate image is kept when every
    boundary condition involving already-assigned elements holds. Only meant
    for very small posets.
    """
    els = list(source.elements())
    results = []
    assignment = {}

    def boundary_set(poset, el, sign, n):
        return boundary(closure(poset, [el]), sign, n).support

    def consistent(el, img):
        for n in range(el.dim + 1):
            for sign in ('-', '+'):
                lhs = boundary_set(target, img, sign, n)
                rhs = GrSet.from_elements(
                    assignment[y]
                    for y in boundary_set(source, el, sign, n).elements())
                if lhs != rhs:
                    return False
        return True

    def extend(i):
        if i == len(els):
            results.append(check_map(source, target, dict(assignment)))
            return
        el = els[i]
        for img in target.elements():
            if img.dim > el.dim:
                continue
            assignment[el] = img
            if consistent(el, img):
                extend(i + 1)
            del assignment[el]

    extend(0)
    return results


def digraph_isomorphic(n1, edges1, n2, edges2):
    """Digraph isomorphism by brute force over vertex permutations."""
    e1, e2 = set(edges1), set(edges2)
    if n1 != n2 or len(e1) != len(e2):
        return False
    for perm in permutations(range(n2)):
        if {(perm[s], perm[t]) for s, t in e1} == e2:
            return True
    return False


def permute_ogposet(poset, rng=None, perms=None):
    """Relabel positions stratum by stratum; returns (poset, perms used).

    perms[n][old_pos] = new_pos. With an rng, draws uniform permutations.
    """
    if perms is None:
        perms = []
        for n in range(poset.dim + 1):
            p = list(range(poset.size(n)))
            rng.shuffle(p)
            perms.append(p)
    face_data = []
    for n in range(poset.dim + 1):
        stratum = [None] * poset.size(n)
        for old in range(poset.size(n)):
            ins, outs = poset.face_data[n][old]
            if n > 0:
                ins = sorted(perms[n - 1][j] for j in ins)
                outs = sorted(perms[n - 1][j] for j in outs)
            stratum[perms[n][old]] = (tuple(ins), tuple(outs))
        face_data.append(stratum)
    return build_ogposet(face_data), perms


def random_digraph(rng, n, p=0.5):
    edges = []
    for s in range(n):
        for t in range(n):
            if s != t and rng.random() < p:
                edges.append((s, t))
    return edges


def relabel_digraph(rng, n, edges):
    perm = list(range(n))
    rng.shuffle(perm)
    return sorted((perm[s], perm[t]) for s, t in edges)


def nest(face_data):
    """Face data as nested tuples, the normal form OgPoset stores."""
    return tuple(
        tuple((tuple(ins), tuple(outs)) for ins, outs in stratum)
        for stratum in face_data)


def random_molecule(rng, max_size=12):
    """A molecule grown by a random sequence of constructor applications.

    Starts from a point and repeatedly wraps the current molecule in an atom
    (unit or rewrite-to-single-cell) or whiskers it with a unit cell at a
    random level, stopping before max_size is exceeded.
    """
    from pastekit import molecule as mol
    from pastekit.ogposet import is_round

    m = mol.point()
    while len(m) < max_size and rng.random() < 0.85:
        options = []
        if is_round(m.underlying):
            options.append('unit')
            if m.dim >= 1:
                options.append('rewrite')
        if m.dim >= 1:
            options.extend(['whisk_after', 'whisk_before'])
        op = rng.choice(options)
        if op == 'unit':
            grown = mol.atom(m, m)
        elif op == 'rewrite':
            lower, _ = mol.boundary_inclusion(m, '-')
            upper, _ = mol.boundary_inclusion(m, '+')
            grown = mol.atom(m, mol.atom(lower, upper))
        else:
            k = rng.randrange(m.dim)
            sign = '+' if op == 'whisk_after' else '-'
            b, _ = mol.boundary_inclusion(m, sign, k)
            if not is_round(b.underlying):
                continue
            unit = mol.atom(b, b)
            if op == 'whisk_after':
                grown = mol.paste(m, unit, k).molecule
            else:
                grown = mol.paste(unit, m, k).molecule
        if len(grown) > max_size:
            break
        m = grown
    return m


def random_loop_theory(rng, n_edges=None, n_cells=None):
    """A one-object theory: loop generators plus 2-cells between chains."""
    from pastekit import diagset

    ds = diagset.DiagSet()
    x = ds.add_point('pt')
    edges = [ds.add_gen('e{}'.format(i), x, x)
             for i in range(n_edges if n_edges is not None else
                            rng.randint(1, 3))]
    count = n_cells if n_cells is not None else rng.randint(0, 3)
    for i in range(count):
        ds.add_gen('c{}'.format(i), random_chain(rng, edges),
                   random_chain(rng, edges))
    return ds


def random_chain(rng, edges):
    """A composable chain of one to three loop edges."""
    from pastekit import diagset

    t = rng.choice(edges)
    for _ in range(rng.randint(0, 2)):
        t = diagset.paste_diagrams(t, rng.choice(edges), 0)
    return t


INVALID_DECLARATION_KINDS = (
    'dimension', 'not-round', 'labels', 'duplicate', 'foreign', 'bad-name')


def invalid_declaration(rng, kind):
    """A thunk performing one bad declaration, with its designated error."""
    from pastekit import diagset, errors

    ds = diagset.DiagSet()
    x = ds.add_point('x')
    a = ds.add_gen('a', x, x)
    b = ds.add_gen('b', x, x)
    chain = diagset.paste_diagrams(a, rng.choice((a, b)), 0)
    if kind == 'dimension':
        lhs, rhs = rng.choice(((x, a), (a, x), (chain, x), (x, chain)))
        return (lambda: ds.add_gen('bad', lhs, rhs)), errors.TypeMismatch
    if kind == 'not-round':
        f = ds.add_gen('f', chain, rng.choice((a, b)))
        whiskered = diagset.paste_diagrams(f, rng.choice((a, b)), 0)
        return (lambda: ds.add_gen('bad', whiskered, whiskered)
                ), errors.NotRound
    if kind == 'labels':
        f = ds.add_gen('f', diagset.paste_diagrams(a, a, 0), a)
        g = ds.add_gen('g', diagset.paste_diagrams(b, b, 0), b)
        return (lambda: ds.add_gen('bad', f, g)), errors.TypeMismatch
    if kind == 'duplicate':
        name = rng.choice(('x', 'a', 'b'))
        return (lambda: ds.add_gen(name, a, b)), errors.DuplicateName
    if kind == 'foreign':
        other = diagset.DiagSet()
        y = other.add_point('y')
        c = other.add_gen('c', y, y)
        return (lambda: ds.add_gen('bad', a, c)), errors.AmbientMismatch
    if kind == 'bad-name':
        name = rng.choice(('', 7, None))
        return (lambda: ds.add_gen(name, a, a)), errors.MalformedData
    raise ValueError('unknown kind {!r}'.format(kind))
