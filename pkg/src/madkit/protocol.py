"""Selection/pairing rules and enumeration of comparison trials.

Morph-input pairing follows a deterministic skip-scan over the
lexicographically sorted image ids: each unused image is paired with the
nearest following unused image of a different subject that has the same
sex and at most one of the two wearing glasses. Every input is used at
most once; leftovers are reported.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

from .core.errors import FormatError, MadkitError
from .core.types import DatasetManifest, MorphPair, Role, Sex


@dataclass(frozen=True)
class ComparisonSet:
    """Genuine / impostor / attack trials as (reference, probe, subject) rows.

    For genuine rows the subject owns both images; for impostor rows it
    is the probe's subject; for attack rows it is the contributing
    subject whose probe is compared against the morph.
    """

    genuine: tuple
    impostor: tuple
    attacks: tuple


def pair_for_morphing(inputs) -> tuple[list[tuple[str, str]], list[str]]:
    """Pair morph-input images; returns (pairs, unpaired leftovers).

    ``inputs``: iterable of (image_id, subject_id, sex, glasses).
    """
    rows = []
    seen = set()
    for image_id, subject_id, sex, glasses in inputs:
        if image_id in seen:
            raise MadkitError(f"duplicate morph-input image id '{image_id}'")
        seen.add(image_id)
        rows.append((str(image_id), str(subject_id), Sex(sex), bool(glasses)))
    rows.sort(key=lambda r: r[0])

    used = [False] * len(rows)
    pairs = []
    for i, (img_i, subj_i, sex_i, gl_i) in enumerate(rows):
        if used[i]:
            continue
        for j in range(i + 1, len(rows)):
            if used[j]:
                continue
            img_j, subj_j, sex_j, gl_j = rows[j]
            if subj_j == subj_i:
                continue
            if sex_j != sex_i or (gl_i and gl_j):
                continue
            pairs.append((img_i, img_j))
            used[i] = used[j] = True
            break
    leftovers = [rows[i][0] for i in range(len(rows)) if not used[i]]
    return pairs, leftovers


def derive_morphs(manifest: DatasetManifest, tool: str = "reference",
                  alpha: float = 0.5) -> DatasetManifest:
    """Return a copy of the manifest with morph pairs built by the scan rule."""
    inputs = []
    for subj in manifest.subjects:
        for img in subj.with_role(Role.MORPH_INPUT):
            inputs.append((img.id, subj.id, subj.sex, img.glasses))
    pairs, _ = pair_for_morphing(inputs)
    morphs = tuple(MorphPair(a=a, b=b, tool=tool, alpha=alpha) for a, b in pairs)
    return replace(manifest, morphs=morphs)


def enumerate_comparisons(manifest: DatasetManifest,
                          contributors: str = "both") -> ComparisonSet:
    """Enumerate all genuine, impostor and morphing-attack trials.

    ``contributors`` selects whose probes are attacked with each morph:
    "both" uses the probes of both contributing subjects (the default),
    "attacker" only those of the alpha-weighted ``a`` side, which is the
    convention for reduced-weight attack analyses.
    """
    if contributors not in ("both", "attacker"):
        raise MadkitError(f"contributors must be 'both' or 'attacker', "
                          f"got {contributors!r}")
    refs = []
    probes = []
    for subj in manifest.subjects:
        for img in subj.with_role(Role.BONA_FIDE_REFERENCE):
            refs.append((img.id, subj.id))
        for img in subj.with_role(Role.PROBE):
            probes.append((img.id, subj.id))

    genuine = []
    impostor = []
    for ref_id, ref_subj in refs:
        for probe_id, probe_subj in probes:
            if ref_subj == probe_subj:
                genuine.append((ref_id, probe_id, probe_subj))
            else:
                impostor.append((ref_id, probe_id, probe_subj))

    owner = {img.id: subj.id for subj in manifest.subjects for img in subj.images}
    probes_of = {}
    for probe_id, probe_subj in probes:
        probes_of.setdefault(probe_subj, []).append(probe_id)

    attacks = []
    for morph in manifest.morphs:
        sides = (morph.a,) if contributors == "attacker" else (morph.a, morph.b)
        for side in sides:
            subj_id = owner.get(side)
            if subj_id is None:
                raise MadkitError(f"morph references unknown image '{side}'")
            for probe_id in probes_of.get(subj_id, []):
                attacks.append((morph.morph_id, probe_id, subj_id))

    return ComparisonSet(genuine=tuple(sorted(genuine)),
                         impostor=tuple(sorted(impostor)),
                         attacks=tuple(sorted(attacks)))


CSV_HEADER = ["kind", "ref_id", "probe_id", "subject_id"]


def save_comparisons(comparisons: ComparisonSet, path, comment: str | None = None) -> None:
    rows = []
    for kind, triples in (("genuine", comparisons.genuine),
                          ("impostor", comparisons.impostor),
                          ("attack", comparisons.attacks)):
        rows += [(kind, *t) for t in triples]
    rows.sort()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)


def load_comparisons(path) -> ComparisonSet:
    genuine, impostor, attacks = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise FormatError(f"{path}: expected header {CSV_HEADER}, got {header}")
    for row in reader:
        if len(row) != 4:
            raise FormatError(f"{path}: malformed row {row}")
        kind, ref_id, probe_id, subject_id = row
        triple = (ref_id, probe_id, subject_id)
        if kind == "genuine":
            genuine.append(triple)
        elif kind == "impostor":
            impostor.append(triple)
        elif kind == "attack":
            attacks.append(triple)
        else:
            raise FormatError(f"{path}: unknown comparison kind '{kind}'")
    return ComparisonSet(tuple(sorted(genuine)), tuple(sorted(impostor)),
                         tuple(sorted(attacks)))
