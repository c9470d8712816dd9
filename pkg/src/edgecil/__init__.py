"""Extreme and median class-sequence generation and evaluation for class-incremental learning."""
from .core import PartitionError, TaskPartition, TaskSequence, format_sequence, parse_sequence
from .enumeration import count_sequences, iterate_sequences, true_distribution
from .seqgen import (GenerationConfig, generate_easy, generate_hard, generate_median, generate_triplet,
                     similarity_score)
from .simio import (AccuracyRecordSet, EmbeddingSet, SimilarityMatrix, cosine_similarity, load_accuracies,
                    load_embeddings, load_similarity)

__version__ = "0.1.0"

__all__ = [
    "AccuracyRecordSet", "EmbeddingSet", "GenerationConfig", "PartitionError", "SimilarityMatrix",
    "TaskPartition", "TaskSequence", "cosine_similarity", "count_sequences", "format_sequence",
    "generate_easy", "generate_hard", "generate_median", "generate_triplet", "iterate_sequences",
    "load_accuracies", "load_embeddings", "load_similarity", "parse_sequence", "similarity_score",
    "true_distribution",
]
