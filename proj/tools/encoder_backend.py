#!/usr/bin/env python3
"""Sequence-classification backend driven over a file protocol.

train   --data DIR --out DIR   fine-tunes a pretrained code encoder on
                               DIR/train.jsonl + validation.jsonl with
                               DIR/hyperparams.json, writing OUT/checkpoint.
predict --model CHECKPOINT --input JSONL --output JSONL

Example lines carry {"id", "label", "text"}; predictions carry
{"id", "label", "score"} where score is the confidence in the emitted label.
The base model comes from CODEPROV_ENCODER_MODEL (default codebert-base).
"""

import argparse
import json
import math
import os
import random
import sys

LABELS = ["human", "chatgpt"]
DEFAULT_MODEL = "microsoft/codebert-base"


def fail(message):
    print(f"encoder_backend: {message}", file=sys.stderr)
    raise SystemExit(3)


def load_ml():
    try:
        import torch
        import transformers
    except ImportError as exc:
        fail(f"missing package ({exc}); install torch and transformers")
    return torch, transformers


def read_jsonl(path):
    rows = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                fail(f"{path}:{lineno}: {exc}")
    return rows


def write_jsonl(path, rows):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row) + "\n")
    os.replace(tmp, path)


def seed_everything(torch, seed):
    random.seed(seed)
    torch.manual_seed(seed)
    try:
        import numpy

        numpy.random.seed(seed % 2**32)
    except ImportError:
        pass


def encode_batch(tokenizer, texts, max_len, torch):
    enc = tokenizer(
        texts,
        truncation=True,
        max_length=max_len,
        padding=True,
        return_tensors="pt",
    )
    return {k: v for k, v in enc.items()}


def batches(rows, size):
    for start in range(0, len(rows), size):
        yield rows[start : start + size]


def evaluate(model, tokenizer, rows, max_len, batch_size, device, torch):
    if not rows:
        return 0.0
    model.eval()
    correct = 0
    with torch.no_grad():
        for chunk in batches(rows, batch_size):
            enc = encode_batch(tokenizer, [r["text"] for r in chunk], max_len, torch)
            enc = {k: v.to(device) for k, v in enc.items()}
            logits = model(**enc).logits
            predicted = logits.argmax(dim=-1).tolist()
            for row, idx in zip(chunk, predicted):
                if LABELS[idx] == row["label"]:
                    correct += 1
    return correct / len(rows)


def cmd_train(args):
    torch, transformers = load_ml()
    with open(os.path.join(args.data, "hyperparams.json"), encoding="utf-8") as handle:
        hp = json.load(handle)
    train_rows = read_jsonl(os.path.join(args.data, "train.jsonl"))
    val_rows = read_jsonl(os.path.join(args.data, "validation.jsonl"))
    if not train_rows:
        fail("training set is empty")
    for row in train_rows + val_rows:
        if row.get("label") not in LABELS:
            fail(f"unknown label {row.get('label')!r} for id {row.get('id')!r}")

    seed_everything(torch, int(hp.get("seed", 42)))
    base = os.environ.get("CODEPROV_ENCODER_MODEL", DEFAULT_MODEL)
    tokenizer = transformers.AutoTokenizer.from_pretrained(base)
    model = transformers.AutoModelForSequenceClassification.from_pretrained(
        base,
        num_labels=len(LABELS),
        id2label=dict(enumerate(LABELS)),
        label2id={name: i for i, name in enumerate(LABELS)},
    )
    device = "cuda" if torch.cuda.is_available() else "cpu"
    model.to(device)

    epochs = int(hp.get("epochs", 5))
    batch_size = int(hp.get("batch_size", 8))
    max_len = int(hp.get("max_len", 512))
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=float(hp.get("learning_rate", 2e-5)),
        weight_decay=float(hp.get("weight_decay", 0.01)),
    )
    steps_per_epoch = math.ceil(len(train_rows) / batch_size)
    total_steps = steps_per_epoch * epochs
    warmup_steps = round(float(hp.get("warmup_fraction", 0.1)) * total_steps)

    def lr_scale(step):
        if warmup_steps and step < warmup_steps:
            return (step + 1) / warmup_steps
        if total_steps == warmup_steps:
            return 1.0
        return max(0.0, (total_steps - step) / max(1, total_steps - warmup_steps))

    scheduler = torch.optim.lr_scheduler.LambdaLR(optimizer, lr_scale)
    loss_fn = torch.nn.CrossEntropyLoss()

    order = list(range(len(train_rows)))
    shuffler = random.Random(int(hp.get("seed", 42)))
    best_accuracy = -1.0
    best_state = None
    for _ in range(epochs):
        model.train()
        shuffler.shuffle(order)
        for chunk in batches(order, batch_size):
            rows = [train_rows[i] for i in chunk]
            enc = encode_batch(tokenizer, [r["text"] for r in rows], max_len, torch)
            enc = {k: v.to(device) for k, v in enc.items()}
            targets = torch.tensor(
                [LABELS.index(r["label"]) for r in rows], device=device
            )
            loss = loss_fn(model(**enc).logits, targets)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()
        accuracy = evaluate(model, tokenizer, val_rows, max_len, batch_size, device, torch)
        # Ties keep the later epoch, matching the linear backend: accuracy is
        # coarse on small validation parts and more training usually helps.
        if accuracy >= best_accuracy:
            best_accuracy = accuracy
            best_state = {k: v.detach().cpu().clone() for k, v in model.state_dict().items()}

    if val_rows and best_state is not None:
        model.load_state_dict(best_state)

    checkpoint = os.path.join(args.out, "checkpoint")
    os.makedirs(checkpoint, exist_ok=True)
    model.save_pretrained(checkpoint)
    tokenizer.save_pretrained(checkpoint)
    with open(os.path.join(checkpoint, "training_summary.json"), "w", encoding="utf-8") as f:
        json.dump(
            {
                "base_model": base,
                "validation_accuracy": best_accuracy if val_rows else None,
                "train_examples": len(train_rows),
                "hyperparams": hp,
            },
            f,
            indent=2,
        )
    print(f"checkpoint written to {checkpoint}")


def cmd_predict(args):
    torch, transformers = load_ml()
    tokenizer = transformers.AutoTokenizer.from_pretrained(args.model)
    model = transformers.AutoModelForSequenceClassification.from_pretrained(args.model)
    device = "cuda" if torch.cuda.is_available() else "cpu"
    model.to(device)
    model.eval()

    rows = read_jsonl(args.input)
    out = []
    with torch.no_grad():
        for chunk in batches(rows, 16):
            enc = encode_batch(tokenizer, [r["text"] for r in chunk], model.config.max_position_embeddings - 2, torch)
            enc = {k: v.to(device) for k, v in enc.items()}
            probs = model(**enc).logits.softmax(dim=-1)
            confidences, predicted = probs.max(dim=-1)
            for row, idx, score in zip(chunk, predicted.tolist(), confidences.tolist()):
                out.append({"id": row["id"], "label": LABELS[idx], "score": score})
    write_jsonl(args.output, out)
    print(f"{len(out)} predictions written to {args.output}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    train = sub.add_parser("train")
    train.add_argument("--data", required=True)
    train.add_argument("--out", required=True)
    train.set_defaults(run=cmd_train)
    predict = sub.add_parser("predict")
    predict.add_argument("--model", required=True)
    predict.add_argument("--input", required=True)
    predict.add_argument("--output", required=True)
    predict.set_defaults(run=cmd_predict)
    args = parser.parse_args()
    try:
        args.run(args)
    except OSError as exc:
        fail(str(exc))


if __name__ == "__main__":
    main()
