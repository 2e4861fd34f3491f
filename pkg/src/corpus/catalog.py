"""The 23 public citation-screening benchmark datasets and their published statistics."""
from typing import Dict, List, Optional, NamedTuple
import re

from src.corpus.schemas import DatasetGroup


class CatalogEntry(NamedTuple):
    name: str
    group: DatasetGroup
    n_total: int
    n_included: int
    published_max_wss95: float  # percent, as printed
    has_metadata: bool


CATALOG: List[CatalogEntry] = [
    CatalogEntry("ACEInhibitors", DatasetGroup.DRUG, 2544, 41, 93.47, True),
    CatalogEntry("ADHD", DatasetGroup.DRUG, 851, 20, 92.77, True),
    CatalogEntry("Antihistamines", DatasetGroup.DRUG, 310, 16, 89.84, True),
    CatalogEntry("Atypical Antipsychotics", DatasetGroup.DRUG, 1120, 146, 82.59, True),
    CatalogEntry("Beta Blockers", DatasetGroup.DRUG, 2072, 42, 93.07, True),
    CatalogEntry("Calcium Channel Blockers", DatasetGroup.DRUG, 1218, 100, 87.20, True),
    CatalogEntry("Estrogens", DatasetGroup.DRUG, 368, 80, 74.35, True),
    CatalogEntry("NSAIDs", DatasetGroup.DRUG, 393, 41, 85.08, True),
    CatalogEntry("Opioids", DatasetGroup.DRUG, 1915, 15, 94.22, True),
    CatalogEntry("Oral Hypoglycemics", DatasetGroup.DRUG, 503, 136, 69.16, True),
    CatalogEntry("Proton PumpInhibitors", DatasetGroup.DRUG, 1333, 51, 91.32, True),
    CatalogEntry("Skeletal Muscle Relaxants", DatasetGroup.DRUG, 1643, 9, 94.45, True),
    CatalogEntry("Statins", DatasetGroup.DRUG, 3465, 85, 92.66, True),
    CatalogEntry("Triptans", DatasetGroup.DRUG, 671, 24, 91.57, True),
    CatalogEntry("Urinary Incontinence", DatasetGroup.DRUG, 327, 40, 83.38, True),
    CatalogEntry("COPD", DatasetGroup.CLINICAL, 1606, 196, 83.36, False),
    CatalogEntry("Proton Beam", DatasetGroup.CLINICAL, 4751, 243, 90.14, False),
    CatalogEntry("Micro Nutrients", DatasetGroup.CLINICAL, 4010, 258, 88.87, False),
    CatalogEntry("PFOA/PFOS", DatasetGroup.SWIFT, 6331, 95, 93.56, True),
    CatalogEntry("Bisphenol A (BPA)", DatasetGroup.SWIFT, 7700, 111, 93.62, True),
    CatalogEntry("Transgenerational", DatasetGroup.SWIFT, 48638, 765, 93.51, True),
    CatalogEntry("Fluoride and neurotoxicity", DatasetGroup.SWIFT, 4479, 51, 93.91, False),
    CatalogEntry("Neuropathic pain | CAMRADES", DatasetGroup.SWIFT, 29207, 5011, 78.70, False),
]


def _normalize(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


_BY_KEY: Dict[str, CatalogEntry] = {_normalize(entry.name): entry for entry in CATALOG}


def find_dataset(name: str) -> Optional[CatalogEntry]:
    """Look a dataset up by a loose name match (`ace_inhibitors`, `ACEInhibitors`, ...)."""
    return _BY_KEY.get(_normalize(name))


def group_of(name: str) -> Optional[DatasetGroup]:
    entry = find_dataset(name)
    return entry.group if entry else None
