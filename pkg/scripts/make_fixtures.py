"""Write the checked-in test fixtures under tests/fixtures/.

The 6-class embedding file uses the first six CIFAR-100 labels with hand-built
attribute vectors (food, animal, aquatic, mammal, furry, human, household,
large) plus a shared positive offset, so cosine similarities are all positive
the way CLIP text similarities usually are.  Re-running this script reproduces
the files byte for byte.
"""
from pathlib import Path

import numpy as np

from edgecil.simio import EmbeddingSet, SimilarityMatrix, save_embeddings, save_similarity
from edgecil.surrogate import SurrogateParams, landscape
from edgecil.simio import save_accuracies

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

CIFAR6 = {
    #               food animal aquatic mammal furry human household large
    "apple":         [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0],
    "aquarium_fish": [0.1, 1.0, 1.0, 0.0, 0.0, 0.0, 0.4, 0.0],
    "baby":          [0.0, 0.3, 0.0, 1.0, 0.0, 1.0, 0.2, 0.0],
    "bear":          [0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
    "beaver":        [0.0, 1.0, 0.8, 1.0, 1.0, 0.0, 0.0, 0.3],
    "bed":           [0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 1.0, 1.0],
}
OFFSET = 0.2


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    vecs = np.array(list(CIFAR6.values())) + OFFSET
    emb = EmbeddingSet(tuple(CIFAR6), vecs)
    save_embeddings(emb, OUT / "cifar6_embeddings.csv")
    save_accuracies(landscape(emb, 3, SurrogateParams(noise_std=0.02)), OUT / "cifar6_landscape.csv")

    block = np.full((4, 4), 0.1)
    block[:2, :2] = block[2:, 2:] = 0.9
    np.fill_diagonal(block, 1.0)
    save_similarity(SimilarityMatrix.from_array(block, ["a", "b", "c", "d"]), OUT / "block4.csv")


if __name__ == "__main__":
    main()
