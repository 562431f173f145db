import hashlib
import json
import os
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

from .logger import store_logger
from .reports import DecisionReport, canonical_json, load_report_or_certificate


@dataclass
class StoredEntry:
    """Index record for one stored certificate or report"""
    digest: str
    kind: str
    path: str
    question: Optional[str] = None
    verdict: Optional[str] = None


class CertificateStore:
    """Content-addressed store: each document lives in <digest>.json under the root directory"""

    def __init__(self, root: str = "certificates"):
        self.root = root
        self.index_file = os.path.join(root, "index.json")
        self.entries: Dict[str, StoredEntry] = {}
        self.load()

    def load(self):
        """Load the index if one exists"""
        if os.path.exists(self.index_file):
            try:
                with open(self.index_file, "r") as f:
                    data = json.load(f)
                self.entries = {e["digest"]: StoredEntry(**e) for e in data.get("entries", [])}
            except (OSError, ValueError, TypeError) as e:
                store_logger.error(f"Error loading certificate index: {e}", exc_info=True)

    def save(self):
        os.makedirs(self.root, exist_ok=True)
        data = {"entries": [asdict(e) for e in sorted(self.entries.values(), key=lambda e: e.digest)]}
        with open(self.index_file, "w") as f:
            json.dump(data, f, indent=2)

    def put(self, document) -> StoredEntry:
        """Store a report or certificate; storing the same content twice is a no-op"""
        if isinstance(document, DecisionReport):
            text, digest = document.canonical_json(), document.digest()
            kind, question, verdict = "report", document.question, document.verdict.value
        else:
            text = canonical_json(document)
            digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
            kind, question, verdict = document.kind, None, None
        if digest in self.entries:
            store_logger.info(f"Already stored: {digest[:12]}")
            return self.entries[digest]
        os.makedirs(self.root, exist_ok=True)
        path = os.path.join(self.root, f"{digest}.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        entry = StoredEntry(digest=digest, kind=kind, path=path, question=question, verdict=verdict)
        self.entries[digest] = entry
        self.save()
        store_logger.info(f"Stored {kind} {digest[:12]} at {path}")
        return entry

    def get(self, digest: str):
        entry = self.entries.get(digest)
        if entry is None:
            return None
        with open(entry.path, "r", encoding="utf-8") as f:
            return load_report_or_certificate(json.load(f))

    def find(self, kind: Optional[str] = None, verdict: Optional[str] = None) -> List[StoredEntry]:
        """Entries filtered by kind and verdict, ordered by digest"""
        found = sorted(self.entries.values(), key=lambda e: e.digest)
        if kind:
            found = [e for e in found if e.kind == kind]
        if verdict:
            found = [e for e in found if e.verdict == verdict]
        return found
