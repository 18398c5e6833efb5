export class ExtractorError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Bad or missing configuration; maps to exit code 1. */
export class ConfigError extends ExtractorError {}

/** A single video could not be decoded; callers skip the video and log. */
export class DecodeError extends ExtractorError {}

/** Backend model weights or runtime unavailable; aborts the run (exit 2). */
export class ModelLoadError extends ExtractorError {}

/** Text or frame content that cannot produce an embedding. */
export class EmbedError extends ExtractorError {}
