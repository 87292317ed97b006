"""revlab: news revision-history toolkit.

Aligns sentences across article revisions, labels edit intentions, predicts
which sentences will factually update, and scores question-answering
abstention against outdated documents.
"""

__version__ = "0.1.0"
