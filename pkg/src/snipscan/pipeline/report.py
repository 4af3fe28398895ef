"""Study reporting: the snippet funnel, category histogram, correlations.

Numbers in parentheses throughout are the source-snippet subset, the
strictest temporal class: snippets older than every matched contract.
"""

from ..detectors import get_detector
from .records import CorrelationResult


def _funnel(result):
    vulnerable = set(result.vulnerable_ids)
    links = [l for l in result.links if l.snippet_id in vulnerable]
    diss_links = [l for l in links if l.is_disseminator]
    src_links = [l for l in links if l.is_source]

    validated = [p for p in result.validation.pairs if p.vulnerable]
    val_diss = [p for p in validated
                if p.temporal_class in ("Disseminator", "Source")]
    val_src = [p for p in validated if p.temporal_class == "Source"]

    return {
        "snippets": {
            "unique": len(result.unique_snippets),
            "vulnerable": len(vulnerable),
            "containedInContracts": len({l.snippet_id for l in links}),
            "postedBeforeDeployment": {
                "disseminator": len({l.snippet_id for l in diss_links}),
                "source": len({l.snippet_id for l in src_links}),
            },
        },
        "contracts": {
            "containingVulnerableSnippets": {
                "disseminator": len(diss_links),
                "source": len(src_links),
            },
            "unique": {
                "disseminator": len({l.contract_id for l in diss_links}),
                "source": len({l.contract_id for l in src_links}),
            },
        },
        "validation": {
            "vulnerableContracts": {
                "disseminator": len({p.contract_id for p in val_diss}),
                "source": len({p.contract_id for p in val_src}),
            },
            "vulnerableSnippetsInVulnerableContracts": {
                "disseminator": len({p.snippet_id for p in val_diss}),
                "source": len({p.snippet_id for p in val_src}),
            },
        },
    }


def _categories(result):
    """Category -> snippet and contract counts (multi-label)."""
    snippet_cats = {}
    for sid, findings in result.findings.items():
        for finding in findings:
            snippet_cats.setdefault(finding.category, set()).add(sid)
    contract_cats = {}
    for pair in result.validation.pairs:
        for detector_id in pair.confirmed:
            category = get_detector(detector_id).category
            contract_cats.setdefault(category, set()).add(pair.contract_id)
    out = {}
    for category in sorted(set(snippet_cats) | set(contract_cats)):
        out[category] = {
            "snippets": len(snippet_cats.get(category, ())),
            "contracts": len(contract_cats.get(category, ())),
        }
    return out


def _correlation_entry(value):
    if isinstance(value, CorrelationResult):
        entry = {
            "n": value.n,
            "rho": value.rho,
            "pValue": value.p_value,
            "variablePair": value.variable_pair,
        }
        if value.permutation_p_value is not None:
            entry["permutationPValue"] = value.permutation_p_value
        return entry
    return {"skipped": str(value)}


def report_json(result):
    return {
        "funnel": _funnel(result),
        "categories": _categories(result),
        "correlations": {group: _correlation_entry(value)
                         for group, value in sorted(result.correlations.items())},
        "counts": dict(result.counts),
        "validationFailures": [
            {"contractId": cid, "reason": reason}
            for cid, reason in result.validation.failures
        ],
        "diagnostics": list(result.diagnostics),
    }


def _pair(block):
    return "%d (%d)" % (block["disseminator"], block["source"])


def report_text(result):
    doc = report_json(result)
    funnel = doc["funnel"]
    lines = []
    rows = [
        ("Snippets", None),
        ("  Unique", str(funnel["snippets"]["unique"])),
        ("  Vulnerable", str(funnel["snippets"]["vulnerable"])),
        ("  Contained in contracts",
         str(funnel["snippets"]["containedInContracts"])),
        ("  Posted before deployment",
         _pair(funnel["snippets"]["postedBeforeDeployment"])),
        ("Contracts", None),
        ("  Containing vulnerable snippets",
         _pair(funnel["contracts"]["containingVulnerableSnippets"])),
        ("  Unique", _pair(funnel["contracts"]["unique"])),
        ("Validation", None),
        ("  Vulnerable contracts",
         _pair(funnel["validation"]["vulnerableContracts"])),
        ("  Vuln. snippets in vuln. contracts",
         _pair(funnel["validation"]["vulnerableSnippetsInVulnerableContracts"])),
    ]
    width = max(len(label) for label, _ in rows) + 2
    for label, value in rows:
        lines.append(label if value is None else label.ljust(width) + value)

    if doc["categories"]:
        lines.append("")
        lines.append("Categories (snippets / contracts)")
        for category, counts in doc["categories"].items():
            lines.append("  %s  %d / %d" % (
                category.ljust(28), counts["snippets"], counts["contracts"]))

    lines.append("")
    lines.append("Correlation (views vs. containing contracts)")
    for group, entry in doc["correlations"].items():
        if "skipped" in entry:
            lines.append("  %s  %s" % (group.ljust(14), entry["skipped"]))
        else:
            text = "n=%d rho=%.3f p=%.4g" % (
                entry["n"], entry["rho"], entry["pValue"])
            if "permutationPValue" in entry:
                text += " perm-p=%.4g" % entry["permutationPValue"]
            lines.append("  %s  %s" % (group.ljust(14), text))

    if doc["validationFailures"]:
        lines.append("")
        lines.append("Validation failures")
        for failure in doc["validationFailures"]:
            lines.append("  %s: %s" % (failure["contractId"], failure["reason"]))
    return "\n".join(lines)
