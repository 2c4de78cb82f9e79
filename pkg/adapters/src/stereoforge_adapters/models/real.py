"""Wrappers around real checkpoints: pyannote diarization, speechbrain
Sepformer separation, speechbrain ECAPA-TDNN verification.

Imports are lazy; a missing toolkit or unreachable checkpoint surfaces as a
load failure (the adapter process exits nonzero), never as a silent
fallback. Inputs are never resampled: the pipeline's rate contract is
enforced upstream, and these models are expected to match it.
"""

import numpy as np


class PyannoteDiarizer:
    def __init__(self, checkpoint, device="cpu"):
        from pyannote.audio import Pipeline  # deferred: heavy optional dep
        import torch

        self.pipeline = Pipeline.from_pretrained(checkpoint)
        self.pipeline.to(torch.device(device))

    def diarize(self, samples, rate):
        import torch

        waveform = torch.from_numpy(np.ascontiguousarray(samples, dtype=np.float32))
        annotation = self.pipeline({"waveform": waveform[None, :], "sample_rate": rate})
        return [(str(label), float(segment.start), float(segment.end))
                for segment, _, label in annotation.itertracks(yield_label=True)]


class SepformerSeparator:
    def __init__(self, checkpoint, device="cpu"):
        from speechbrain.inference.separation import SepformerSeparation

        self.model = SepformerSeparation.from_hparams(
            source=checkpoint, run_opts={"device": device})

    def separate(self, samples, rate):
        import torch

        batch = torch.from_numpy(np.ascontiguousarray(samples, dtype=np.float32))[None, :]
        est = self.model.separate_batch(batch)  # (1, time, n_sources)
        est = est[0].T.cpu().numpy().astype(np.float64)
        if est.shape[0] < 2:
            raise RuntimeError(f"checkpoint produced {est.shape[0]} sources, need 2")
        first, second = est[0], est[1]
        n = len(samples)
        # some checkpoints pad to a block size; trim or zero-pad back
        fix = lambda x: x[:n] if len(x) >= n else np.pad(x, (0, n - len(x)))
        return fix(first), fix(second)


class EcapaVerifier:
    def __init__(self, checkpoint, device="cpu"):
        from speechbrain.inference.speaker import EncoderClassifier

        self.model = EncoderClassifier.from_hparams(
            source=checkpoint, run_opts={"device": device})

    def embed(self, samples, rate):
        import torch

        batch = torch.from_numpy(np.ascontiguousarray(samples, dtype=np.float32))[None, :]
        emb = self.model.encode_batch(batch)[0, 0].cpu().numpy().astype(np.float64)
        norm = np.linalg.norm(emb)
        return emb / norm if norm > 0 else emb
