"""Seeded random input generators for the oracle cross-check suites.

Everything takes an explicit random.Random so failures reproduce from
the printed seed. Scales are tuned so each whole suite stays inside the
desk-scale time budget.
"""

from __future__ import annotations

import random
from typing import Sequence

from vtkb import (
    CompatibilityRule,
    ContextSpec,
    Coordinates2D,
    Coordinates3D,
    DataItem,
    EvaluationRecord,
    GeoName,
    Individual,
    KnowledgeBase,
    ObjectAnchored,
    PropertyDef,
    PropertyKind,
    RuleAtom,
    RulePredicate,
    SceneSpec,
    Severity,
    TaskSpec,
    Taxonomy,
    candidates,
    canonical,
    validate,
    with_builtin_rules,
)
from vtkb.model import AnchorSlot
from vtkb.queries import EntityRef, FilterAtom, PropertyAtom, Query, TypeAtom, Variable

LITERAL_NUMBERS = (0.0, 1.5, -2.0, 3.25, 18.0, 100.0)
LITERAL_STRINGS = ("alpha", "beta", "gamma", "x", "")
LITERAL_BOOLS = (True, False)


# ---------------------------------------------------------------------
# Taxonomies
# ---------------------------------------------------------------------

def random_dag(rng: random.Random, max_concepts: int = 100,
               max_edges: int = 300) -> tuple[list[str], list[tuple[str, str]]]:
    """Concept names plus acyclic edges (child precedes parent index)."""
    n = rng.randint(1, max_concepts)
    names = [f"vt:C{i}" for i in range(n)]
    possible = [(names[i], names[j]) for i in range(n) for j in range(i)]
    rng.shuffle(possible)
    count = rng.randint(0, min(max_edges, len(possible)))
    return names, possible[:count]


def rooted_dag(rng: random.Random, size: int) -> tuple[list[str], list[tuple[str, str]]]:
    """A DAG where every concept descends from the first one."""
    names = [f"vt:C{i}" for i in range(size)]
    edges = []
    for i in range(1, size):
        parents = rng.sample(range(i), k=min(i, rng.choice((1, 1, 1, 2))))
        for j in parents:
            edges.append((names[i], names[j]))
    return names, edges


# ---------------------------------------------------------------------
# Query-oracle cases
# ---------------------------------------------------------------------

def random_query_kb(rng: random.Random, n_individuals: int) -> KnowledgeBase:
    concepts, edges = rooted_dag(rng, rng.randint(3, 8))
    object_props = [f"vt:p{i}" for i in range(2)]
    datum_props = ["vt:num", "vt:txt", "vt:flag"]
    datum_ranges = {"vt:num": "Number", "vt:txt": "Text", "vt:flag": "Boolean"}
    props = [PropertyDef(id=p, kind=PropertyKind.OBJECT,
                         domain=concepts[0], range=concepts[0])
             for p in object_props]
    props += [PropertyDef(id=p, kind=PropertyKind.DATUM,
                          domain=concepts[0], range=datum_ranges[p])
              for p in datum_props]

    ind_ids = [f"vt:I{i}" for i in range(n_individuals)]
    individuals = []
    for ind_id in ind_ids:
        types = tuple(rng.sample(concepts, k=rng.choice((1, 1, 2))))
        object_assertions = []
        for _ in range(rng.randint(0, 3)):
            target = rng.choice(ind_ids + ["vt:Dangling"])
            object_assertions.append((rng.choice(object_props), target))
        datum_assertions = []
        for _ in range(rng.randint(0, 3)):
            prop = rng.choice(datum_props)
            if prop == "vt:num":
                value = rng.choice(LITERAL_NUMBERS)
            elif prop == "vt:txt":
                value = rng.choice(LITERAL_STRINGS)
            else:
                value = rng.choice(LITERAL_BOOLS)
            datum_assertions.append((prop, value))
        individuals.append(Individual(
            id=ind_id, asserted_types=types,
            object_assertions=tuple(object_assertions),
            datum_assertions=tuple(datum_assertions)))

    return KnowledgeBase(
        taxonomy=Taxonomy(concepts=tuple(concepts),
                          direct_subsumptions=tuple(edges)),
        properties=tuple(props),
        individuals=tuple(individuals))


def random_query(rng: random.Random, kb: KnowledgeBase,
                 max_vars: int, max_atoms: int = 5) -> Query:
    var_pool = [Variable(n) for n in ("a", "b", "c")][:max_vars]
    concepts = list(kb.taxonomy.concepts)
    object_props = [p.id for p in kb.properties if p.kind is PropertyKind.OBJECT]
    datum_props = [p.id for p in kb.properties if p.kind is PropertyKind.DATUM]
    ind_ids = [i.id for i in kb.individuals]

    atoms = []
    n_atoms = rng.randint(1, max_atoms - 1)
    for _ in range(n_atoms):
        kind = rng.random()
        if kind < 0.4:
            atoms.append(TypeAtom(var=rng.choice(var_pool),
                                  concept=rng.choice(concepts)))
        else:
            subject = rng.choice(var_pool)
            prop = rng.choice(object_props + datum_props)
            roll = rng.random()
            if roll < 0.5:
                value = rng.choice(var_pool)
            elif roll < 0.7:
                value = EntityRef(rng.choice(ind_ids + concepts))
            else:
                value = rng.choice(LITERAL_NUMBERS + LITERAL_STRINGS
                                   + LITERAL_BOOLS)
            atoms.append(PropertyAtom(subject=subject, prop=prop, value=value))

    generated = []
    for atom in atoms:
        if isinstance(atom, TypeAtom):
            pool = [atom.var]
        else:
            pool = [atom.subject]
            if isinstance(atom.value, Variable):
                pool.append(atom.value)
        for var in pool:
            if var not in generated:
                generated.append(var)

    if len(atoms) < max_atoms and rng.random() < 0.4:
        op = rng.choice(("=", "!=", "<", "<=", ">", ">="))
        literal = rng.choice(LITERAL_NUMBERS + LITERAL_STRINGS + LITERAL_BOOLS)
        atoms.append(FilterAtom(var=rng.choice(generated), op=op,
                                literal=literal))

    head_size = rng.randint(1, len(generated))
    head = tuple(rng.sample(generated, k=head_size))
    return Query(head=head, body=tuple(atoms))


# ---------------------------------------------------------------------
# Selection-oracle cases
# ---------------------------------------------------------------------

_SKELETON_CONCEPTS = [
    ("vt:Top", None),
    ("vt:Data", "vt:Top"),
    ("vt:DataType", "vt:Top"),
    ("vt:EnvironmentalIssue", "vt:Top"),
    ("vt:UrbanObject", "vt:Top"),
    ("vt:Building", "vt:UrbanObject"),
    ("vt:Geolocation", "vt:Top"),
    ("vt:Coordinates2D", "vt:Geolocation"),
    ("vt:Coordinates3D", "vt:Geolocation"),
    ("vt:GeoName", "vt:Geolocation"),
    ("vt:ObjectAnchored", "vt:Geolocation"),
    ("vt:Visualization_Technique", "vt:Top"),
]

_STANDARD_PROPS = [
    ("hasDataType", PropertyKind.OBJECT, "vt:Data", "vt:DataType"),
    ("hasFormat", PropertyKind.DATUM, "vt:Data", "Text"),
    ("hasIssue", PropertyKind.OBJECT, "vt:Top", "vt:EnvironmentalIssue"),
    ("hasUrbanObject", PropertyKind.OBJECT, "vt:Top", "vt:UrbanObject"),
    ("hasGeolocation", PropertyKind.OBJECT, "vt:Data", "vt:Geolocation"),
    ("locX", PropertyKind.DATUM, "vt:Geolocation", "Number"),
    ("locY", PropertyKind.DATUM, "vt:Geolocation", "Number"),
    ("locZ", PropertyKind.DATUM, "vt:Geolocation", "Number"),
    ("geoName", PropertyKind.DATUM, "vt:Geolocation", "Text"),
    ("acceptsDataType", PropertyKind.OBJECT, "vt:Visualization_Technique", "vt:DataType"),
    ("outputSpace", PropertyKind.DATUM, "vt:Visualization_Technique", "Text"),
    ("outputDim", PropertyKind.DATUM, "vt:Visualization_Technique", "Text"),
    ("anchorSlot", PropertyKind.DATUM, "vt:Visualization_Technique", "Text"),
    ("transparency", PropertyKind.DATUM, "vt:Visualization_Technique", "Boolean"),
    ("sizeMode", PropertyKind.DATUM, "vt:Visualization_Technique", "Text"),
]


def _random_output(rng: random.Random) -> tuple[str, str, str]:
    slot = rng.choice(("Volume", "Volume", "Surface", "TopOfObject",
                       "SideOfObject", "Overlay"))
    dim = "D3" if slot == "Volume" else rng.choice(("D2", "D3"))
    if slot == "Overlay":
        space = rng.choice(("ScreenSpace", "WorldSpace", "ViewSpace"))
    else:
        space = rng.choice(("WorldSpace", "ViewSpace"))
    return space, dim, slot


def random_selection_kb(rng: random.Random,
                        max_techniques: int = 20) -> KnowledgeBase:
    concepts = [c for c, _ in _SKELETON_CONCEPTS]
    edges = [(c, p) for c, p in _SKELETON_CONCEPTS if p]

    type_names = ["vt:Text", "vt:Numeric", "vt:Scalar", "vt:Vector"]
    for name in type_names:
        concepts.append(name)
    edges += [("vt:Text", "vt:DataType"), ("vt:Numeric", "vt:DataType"),
              ("vt:Scalar", "vt:Numeric"), ("vt:Vector", "vt:DataType")]
    issue_names = [f"vt:Issue{i}" for i in range(rng.randint(2, 3))]
    for name in issue_names:
        concepts.append(name)
        edges.append((name, "vt:EnvironmentalIssue"))

    individuals = [Individual(id=n, asserted_types=(n,))
                   for n in type_names + issue_names]
    object_ids = [f"vt:Obj{i}" for i in range(rng.randint(2, 3))]
    individuals += [Individual(id=o, asserted_types=("vt:Building",))
                    for o in object_ids]

    tech_count = rng.randint(4, max_techniques)
    tech_ids = []
    for i in range(tech_count):
        accepted = rng.choice(type_names + ["vt:DataType"])
        issues: Sequence[str]
        if rng.random() < 0.3:
            issues = ()
        else:
            issues = tuple(rng.sample(issue_names,
                                      k=rng.randint(1, len(issue_names))))
        space, dim, slot = _random_output(rng)
        tech_id = f"vt:T{i}"
        tech_ids.append(tech_id)
        object_assertions = [("acceptsDataType", accepted)]
        object_assertions += [("hasIssue", issue) for issue in issues]
        individuals.append(Individual(
            id=tech_id,
            asserted_types=("vt:Visualization_Technique",),
            object_assertions=tuple(object_assertions),
            datum_assertions=(
                ("outputSpace", space), ("outputDim", dim),
                ("anchorSlot", slot),
                ("transparency", rng.choice(LITERAL_BOOLS)),
                ("sizeMode", rng.choice(("Fixed", "Dynamic"))),
            )))

    tasks = tuple(TaskSpec(id=f"vt:task{i}", attributes=())
                  for i in range(2))
    contexts = tuple(
        ContextSpec(id=f"vt:ctx{i}",
                    attributes=(("viewpointFrame",
                                 rng.choice(("Inside", "Outside"))),))
        for i in range(2))

    evaluations = []
    for i, tech_id in enumerate(tech_ids):
        for _ in range(rng.randint(0, 2)):
            task = rng.choice([t.id for t in tasks] + ["*"])
            context = rng.choice([c.id for c in contexts] + ["*"])
            evaluations.append(EvaluationRecord(
                id=f"vt:E{len(evaluations)}", technique=tech_id,
                task=task, context=context,
                score=round(rng.random(), 2), provenance="generated"))

    rules: list[CompatibilityRule] = []
    if rng.random() < 0.5:
        rules.append(CompatibilityRule(
            id="vt:crowding-warning", severity=Severity.WARN,
            condition=(
                RuleAtom(predicate=RulePredicate.SAME_DATA_TYPE),
                RuleAtom(predicate=RulePredicate.SAME_LOCATION,
                         epsilon=rng.choice((0.75, 2.0))),
            )))
    if rng.random() < 0.3:
        rules.append(CompatibilityRule(
            id="vt:no-volume-twins", severity=Severity.WARN,
            condition=(
                RuleAtom(predicate=RulePredicate.SLOT_EQUALS,
                         slot=AnchorSlot.VOLUME),
                RuleAtom(predicate=RulePredicate.SAME_OBJECT,
                         negated=rng.random() < 0.3),
            )))

    kb = KnowledgeBase(
        taxonomy=Taxonomy(concepts=tuple(concepts),
                          direct_subsumptions=tuple(edges)),
        properties=tuple(PropertyDef(id=p, kind=k, domain=d, range=r)
                         for p, k, d, r in _STANDARD_PROPS),
        individuals=tuple(individuals),
        evaluations=tuple(evaluations),
        tasks=tasks,
        contexts=contexts,
        rules=tuple(rules),
    )
    if rng.random() < 0.7:
        kb = with_builtin_rules(kb)
    return kb


def random_scene(rng: random.Random, kb: KnowledgeBase,
                 max_items: int = 5,
                 max_product: int = 4000) -> SceneSpec | None:
    """A feasible scene whose candidate product stays enumerable."""
    type_names = ["vt:Text", "vt:Numeric", "vt:Scalar", "vt:Vector"]
    issue_names = [i.id for i in kb.individuals
                   if any(canonical(t).startswith("vt:Issue")
                          for t in i.asserted_types)]
    object_ids = [i.id for i in kb.individuals
                  if "vt:Building" in i.asserted_types]
    centers = [(0.0, 0.0, 0.0), (50.0, 10.0, 5.0)]
    closure = kb.subsumption

    for _ in range(40):
        items = []
        for i in range(rng.randint(1, max_items)):
            roll = rng.random()
            if roll < 0.55:
                cx, cy, cz = rng.choice(centers)
                jitter = rng.choice((0.0, 0.4, 5.0))
                location = Coordinates3D(x=cx + jitter, y=cy, z=cz)
            elif roll < 0.7:
                cx, cy, _ = rng.choice(centers)
                location = Coordinates2D(x=cx, y=cy)
            elif roll < 0.9:
                location = ObjectAnchored(urban_object=rng.choice(object_ids))
            else:
                location = GeoName(name=rng.choice(("north-gate", "plaza")))
            items.append(DataItem(
                id=f"vt:item{i}",
                data_type=rng.choice(type_names),
                geolocation=location,
                issue=rng.choice(issue_names + [None]),
                urban_object=rng.choice(object_ids + [None, None]),
            ))
        lists = [candidates(kb, closure, item) for item in items]
        if any(not c for c in lists):
            continue
        product = 1
        for c in lists:
            product *= len(c)
        if product > max_product:
            continue
        roll = rng.random()
        if roll < 0.7:
            active = None
        elif roll < 0.85:
            active = ()
        else:
            pool = [r.id for r in kb.rules]
            active = tuple(rng.sample(pool, k=rng.randint(0, len(pool)))) \
                if pool else ()
        return SceneSpec(
            data_items=tuple(items),
            task=rng.choice([t.id for t in kb.tasks]),
            context=rng.choice([c.id for c in kb.contexts]),
            active_rules=active)
    return None


# ---------------------------------------------------------------------
# Round-trip KBs
# ---------------------------------------------------------------------

def random_roundtrip_kb(rng: random.Random) -> KnowledgeBase:
    """A valid KB exercising every statement kind for parse/serialize."""
    size = rng.randint(2, 10)
    concepts, edges = rooted_dag(rng, size)
    root = concepts[0]

    object_props = [f"vt:op{i}" for i in range(rng.randint(0, 2))]
    datum_props = [("vt:dnum", "Number"), ("vt:dtxt", "Text"),
                   ("vt:dflag", "Boolean"), ("vt:duri", "URI")]
    datum_props = datum_props[:rng.randint(1, 4)]
    props = [PropertyDef(id=p, kind=PropertyKind.OBJECT, domain=root,
                         range=root) for p in object_props]
    props += [PropertyDef(id=p, kind=PropertyKind.DATUM, domain=root,
                          range=r) for p, r in datum_props]

    strings = ('plain', 'with "quotes"', 'back\\slash', 'größe', '')
    ind_ids = [f"vt:N{i}" for i in range(rng.randint(1, 6))]
    individuals = []
    for ind_id in ind_ids:
        object_assertions = []
        if object_props and rng.random() < 0.6:
            object_assertions.append((rng.choice(object_props),
                                      rng.choice(ind_ids)))
        datum_assertions = []
        for prop, tag in datum_props:
            if rng.random() < 0.5:
                continue
            if tag == "Number":
                value = rng.choice((-1.5, 0.0, 2.25, 1e-07, 12345678901.5))
            elif tag == "Boolean":
                value = rng.choice(LITERAL_BOOLS)
            else:
                value = rng.choice(strings[:-1]) if tag == "URI" \
                    else rng.choice(strings)
            datum_assertions.append((prop, value))
        individuals.append(Individual(
            id=ind_id,
            asserted_types=tuple(rng.sample(concepts,
                                            k=rng.choice((1, 1, 2)))),
            object_assertions=tuple(object_assertions),
            datum_assertions=tuple(datum_assertions)))

    tasks = tuple(TaskSpec(id=f"vt:tk{i}",
                           attributes=(("kind", rng.choice(strings[:2])),)
                           if rng.random() < 0.7 else ())
                  for i in range(rng.randint(0, 2)))
    contexts = tuple(
        ContextSpec(id=f"vt:cx{i}",
                    attributes=(("viewpointFrame",
                                 rng.choice(("Inside", "Outside"))),
                                ("weight", rng.choice(LITERAL_NUMBERS))))
        for i in range(rng.randint(0, 2)))

    evaluations = tuple(
        EvaluationRecord(
            id=f"vt:ev{i}", technique=rng.choice(ind_ids),
            task=rng.choice([t.id for t in tasks] + ["*"]),
            context=rng.choice([c.id for c in contexts] + ["*"]),
            score=round(rng.random(), 3), provenance=rng.choice(strings[:4] or ("src",)) or "src")
        for i in range(rng.randint(0, 3)))

    rules = []
    for i in range(rng.randint(0, 2)):
        atoms = []
        for _ in range(rng.randint(1, 3)):
            predicate = rng.choice(list(RulePredicate))
            kwargs = {}
            if predicate is RulePredicate.SLOT_EQUALS:
                kwargs["slot"] = rng.choice(list(AnchorSlot))
            elif predicate is RulePredicate.SAME_LOCATION and rng.random() < 0.5:
                kwargs["epsilon"] = rng.choice((0.5, 1.0, 2.25))
            atoms.append(RuleAtom(predicate=predicate,
                                  negated=rng.random() < 0.3, **kwargs))
        rules.append(CompatibilityRule(
            id=f"vt:rl{i}",
            severity=rng.choice((Severity.FORBID, Severity.WARN)),
            condition=tuple(atoms)))

    kb = KnowledgeBase(
        taxonomy=Taxonomy(concepts=tuple(concepts),
                          direct_subsumptions=tuple(edges)),
        properties=tuple(props),
        individuals=tuple(individuals),
        evaluations=evaluations,
        tasks=tasks,
        contexts=contexts,
        rules=tuple(rules),
    )
    problems = validate(kb)
    assert not problems, f"generator produced an invalid KB: {problems[:3]}"
    return kb
