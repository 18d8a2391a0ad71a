import type { Renderer } from "../src/controller.js";
import type { Screen, ViewState } from "../src/state.js";

export interface Frame {
  screen: Screen;
  reservationState: string | null;
  error: string | null;
  notice: string | null;
}

/** Renderer stand-in: records what would have been drawn, frame by frame. */
export class RecordingRenderer implements Renderer {
  frames: Frame[] = [];

  render(state: ViewState, screen: Screen): void {
    this.frames.push({
      screen,
      reservationState: state.reservation?.state ?? null,
      error: state.error,
      notice: null,
    });
  }

  last(): Frame {
    const frame = this.frames[this.frames.length - 1];
    if (!frame) throw new Error("nothing rendered yet");
    return frame;
  }
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
