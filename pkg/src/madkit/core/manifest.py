"""Manifest file schema, parsing and rule validation.

The manifest is a single YAML document (UTF-8, human-editable)::

    format: madkit/1
    subjects:
      - id: s0001
        sex: male
        images:
          - {id: s0001_r1, role: bona-fide-reference, session: 1, glasses: false}
          - {id: s0001_m1, role: morph-input, session: 1, glasses: false}
          - {id: s0001_p1, role: probe, session: 2, glasses: false}
    morphs:
      - {a: s0001_m1, b: s0002_m1, tool: reference, alpha: 0.5}
    post_processing:
      s0001_r1: JP2

Schema problems (missing fields, bad enum values) raise ManifestError at
parse time; violations of the pairing/selection rules are collected by
:func:`validate_manifest` into a report instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ManifestError
from .types import (
    DatasetManifest,
    ImageEntry,
    MorphPair,
    PostProcessing,
    Role,
    Sex,
    SubjectRecord,
)

FORMAT_TAG = "madkit/1"


@dataclass(frozen=True)
class Violation:
    rule: str
    offender: str
    message: str

    def __str__(self):
        return f"[{self.rule}] {self.offender}: {self.message}"


def _require(mapping, key, kind, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ManifestError(f"missing required field", field=f"{where}.{key}")
    value = mapping[key]
    if not isinstance(value, kind):
        raise ManifestError(
            f"expected {kind.__name__}, got {type(value).__name__}",
            field=f"{where}.{key}",
        )
    return value


def _parse_enum(enum_cls, raw, where):
    try:
        return enum_cls(raw)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise ManifestError(f"invalid value {raw!r}, expected one of: {valid}",
                            field=where) from None


def parse_manifest(text: str) -> DatasetManifest:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ManifestError(f"not valid YAML: {exc}", line=line) from None
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a mapping at top level")
    fmt = doc.get("format")
    if fmt != FORMAT_TAG:
        raise ManifestError(f"unsupported format tag {fmt!r}, expected {FORMAT_TAG!r}",
                            field="format")

    subjects = []
    for si, raw_subj in enumerate(doc.get("subjects") or []):
        where = f"subjects[{si}]"
        sid = _require(raw_subj, "id", str, where)
        sex = _parse_enum(Sex, _require(raw_subj, "sex", str, where), f"{where}.sex")
        images = []
        for ii, raw_img in enumerate(raw_subj.get("images") or []):
            iwhere = f"{where}.images[{ii}]"
            images.append(ImageEntry(
                id=_require(raw_img, "id", str, iwhere),
                role=_parse_enum(Role, _require(raw_img, "role", str, iwhere),
                                 f"{iwhere}.role"),
                session=int(raw_img.get("session", 1)),
                glasses=bool(raw_img.get("glasses", False)),
            ))
        subjects.append(SubjectRecord(id=sid, sex=sex, images=tuple(images)))

    morphs = []
    for mi, raw_morph in enumerate(doc.get("morphs") or []):
        where = f"morphs[{mi}]"
        alpha = raw_morph.get("alpha", 0.5)
        if not isinstance(alpha, (int, float)):
            raise ManifestError("alpha must be a number", field=f"{where}.alpha")
        morphs.append(MorphPair(
            a=_require(raw_morph, "a", str, where),
            b=_require(raw_morph, "b", str, where),
            tool=str(raw_morph.get("tool", "reference")),
            alpha=float(alpha),
        ))

    post = {}
    for img_id, tag in (doc.get("post_processing") or {}).items():
        post[str(img_id)] = _parse_enum(PostProcessing, tag,
                                        f"post_processing.{img_id}")

    return DatasetManifest(subjects=tuple(subjects), morphs=tuple(morphs),
                           post_processing=post)


def load_manifest(path) -> DatasetManifest:
    return parse_manifest(Path(path).read_text(encoding="utf-8"))


def manifest_to_dict(manifest: DatasetManifest) -> dict:
    doc = {"format": FORMAT_TAG, "subjects": []}
    for subj in manifest.subjects:
        doc["subjects"].append({
            "id": subj.id,
            "sex": subj.sex.value,
            "images": [
                {"id": img.id, "role": img.role.value, "session": img.session,
                 "glasses": img.glasses}
                for img in subj.images
            ],
        })
    if manifest.morphs:
        doc["morphs"] = [
            {"a": m.a, "b": m.b, "tool": m.tool, "alpha": m.alpha}
            for m in manifest.morphs
        ]
    if manifest.post_processing:
        doc["post_processing"] = {
            img_id: tag.value for img_id, tag in
            sorted(manifest.post_processing.items())
        }
    return doc


def save_manifest(manifest: DatasetManifest, path) -> None:
    text = yaml.safe_dump(manifest_to_dict(manifest), sort_keys=False,
                          default_flow_style=False, allow_unicode=True)
    Path(path).write_text(text, encoding="utf-8")


def validate_manifest(manifest: DatasetManifest) -> list[Violation]:
    """Check every pairing/selection rule; empty report means valid.

    Pure function: repeated calls on the same manifest return the same
    report, in a deterministic (rule, offender) order.
    """
    violations = []

    seen_subjects = set()
    for subj in manifest.subjects:
        if subj.id in seen_subjects:
            violations.append(Violation("duplicate subject", subj.id,
                                        "subject id declared twice"))
        seen_subjects.add(subj.id)

    owner = {}
    role_of = {}
    glasses_of = {}
    sex_of_image = {}
    for subj in manifest.subjects:
        for img in subj.images:
            if img.id in owner:
                violations.append(Violation("duplicate image", img.id,
                                            "image id declared twice"))
                continue
            owner[img.id] = subj.id
            role_of[img.id] = img.role
            glasses_of[img.id] = img.glasses
            sex_of_image[img.id] = subj.sex

    used_inputs = set()
    for morph in manifest.morphs:
        mid = morph.morph_id
        missing = False
        for side in (morph.a, morph.b):
            if side not in owner:
                violations.append(Violation("unknown image", mid,
                                            f"morph references unknown image '{side}'"))
                missing = True
            elif role_of[side] != Role.MORPH_INPUT:
                violations.append(Violation(
                    "not a morph input", mid,
                    f"image '{side}' has role '{role_of[side].value}'"))
        if not (0.0 < morph.alpha < 1.0):
            violations.append(Violation("alpha out of range", mid,
                                        f"alpha={morph.alpha} outside (0, 1)"))
        if missing:
            continue
        if owner[morph.a] == owner[morph.b]:
            violations.append(Violation("pair same subject", mid,
                                        "both inputs depict the same subject"))
        if sex_of_image[morph.a] != sex_of_image[morph.b]:
            violations.append(Violation("pair sex mismatch", mid,
                                        "paired subjects are of different sex"))
        if glasses_of[morph.a] and glasses_of[morph.b]:
            violations.append(Violation("pair glasses", mid,
                                        "both paired images show glasses"))
        for side in (morph.a, morph.b):
            if side in used_inputs:
                violations.append(Violation("input reuse", side,
                                            "morph input image used more than once"))
            used_inputs.add(side)

    for img_id in manifest.post_processing:
        morph_ids = {m.morph_id for m in manifest.morphs}
        if img_id not in owner and img_id not in morph_ids:
            violations.append(Violation("unknown image", img_id,
                                        "post-processing tag on unknown image"))
        elif img_id in owner and role_of[img_id] != Role.BONA_FIDE_REFERENCE:
            violations.append(Violation(
                "post-processing non-reference", img_id,
                f"tag on image with role '{role_of[img_id].value}'"))

    return sorted(violations, key=lambda v: (v.rule, v.offender, v.message))
