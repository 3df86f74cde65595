"""
Sparse two-topic documents
==========================

1000 bag-of-words vectors over 700 terms, stored as CSR.  A linear SVM is
compared with the nearest-neighbour rule on an 80/20 split.
"""
import os
import tempfile

import numpy as np

from ksvm import gen_topics, load_model, save_model, split, train_svc
from ksvm.classify import predict_labels
from ksvm.data import read_sparse, write_sparse
from ksvm.experiments import nearest_neighbour_predict

data = gen_topics(1000, 700, seed=0)
print("nonzeros per document:", data.X.getnnz(axis=1).mean())
train, test = split(data, 0.8, seed=0)

model = train_svc(train.X, train.y, C=10.0)
svm = np.mean(predict_labels(model, test.X) != test.y)
nn = np.mean(nearest_neighbour_predict(train.X, train.y, test.X) != test.y)
print(f"train error {np.mean(predict_labels(model, train.X) != train.y):.3f}")
print(f"test error: SVM {100 * svm:.1f}%   1-NN {100 * nn:.1f}%")

# the text formats round-trip exactly
with tempfile.TemporaryDirectory() as tmp:
    write_sparse(os.path.join(tmp, "docs.txt"), test)
    back = read_sparse(os.path.join(tmp, "docs.txt"))
    print("dataset round trip exact:", (back.X != test.X).nnz == 0)
    save_model(os.path.join(tmp, "m.txt"), model)
    again = load_model(os.path.join(tmp, "m.txt"))
    print("model round trip max diff:", np.abs(again.decision_function(test.X) - model.decision_function(test.X)).max())
