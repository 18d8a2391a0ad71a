// Controller behavior against a scripted in-memory server: verbatim error
// display, local-only dismissal, and state flips arriving via the poll.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AppController } from "../src/controller.js";
import { RecordingRenderer } from "./helpers.js";

interface Route {
  status: number;
  body: unknown;
}

class FakeServer {
  calls: string[] = [];
  routes = new Map<string, Route>();

  set(method: string, path: string, status: number, body: unknown): void {
    this.routes.set(`${method} ${path}`, { status, body });
  }

  fetch = async (url: string | URL | Request, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const path = new URL(String(url), "http://fake").pathname;
    const key = `${method} ${path}`;
    this.calls.push(key);
    const route = this.routes.get(key);
    if (!route) return new Response(JSON.stringify({ error: "NotFound", detail: key }), { status: 404 });
    return new Response(JSON.stringify(route.body), { status: route.status });
  };
}

function makeController(server: FakeServer) {
  const api = new ApiClient("http://fake", server.fetch as typeof fetch);
  api.token = "token-1";
  const renderer = new RecordingRenderer();
  const controller = new AppController(api, renderer, { now: () => new Date("2025-03-03T02:05:00Z") });
  controller.state.token = "token-1";
  return { controller, renderer };
}

const RESERVATION = {
  reservation_id: "res-1",
  desk_id: "zone-1-desk-1",
  zone_id: "zone-1",
  start: "2025-03-03T02:00:00Z",
  end: "2025-03-03T04:00:00Z",
  state: "reserved",
  check_in_time: null,
};

describe("error passthrough", () => {
  it("shows the server's conflict message verbatim", async () => {
    const server = new FakeServer();
    server.set("POST", "/reservations", 409, {
      error: "DeskConflict",
      detail: "desk zone-1-desk-1 already booked",
    });
    const { controller, renderer } = makeController(server);
    await controller.reserveDesk("zone-1-desk-1", "2025-03-03T03:00:00Z");
    expect(renderer.last().error).toBe("DeskConflict: desk zone-1-desk-1 already booked");
    expect(controller.state.reservation).toBeNull();
  });

  it("shows wrong-desk check-in errors inline", async () => {
    const server = new FakeServer();
    server.set("POST", "/reservations/res-1/checkin", 422, {
      error: "WrongDesk",
      detail: "scanned desk zone-1-desk-2, reserved desk zone-1-desk-1",
    });
    const { controller, renderer } = makeController(server);
    controller.state.reservation = { ...RESERVATION } as never;
    await controller.checkIn("other-code");
    expect(renderer.last().error).toMatch(/^WrongDesk: scanned desk/);
    expect(controller.state.reservation?.state).toBe("reserved");
  });
});

describe("prompt dismissal", () => {
  it("makes no API call and empties the queue", async () => {
    const server = new FakeServer();
    const { controller } = makeController(server);
    controller.state.reservation = { ...RESERVATION, state: "in_use" } as never;
    controller.state.promptTimes = ["2025-03-03T02:00:00Z"];
    expect(controller.currentScreen()).toBe("feedback-prompt");
    controller.dismissPrompt();
    expect(server.calls).toEqual([]);
    expect(controller.pending()).toEqual([]);
    expect(controller.currentScreen()).not.toBe("feedback-prompt");
  });
});

describe("polling", () => {
  it("flips a reserved session to expired on the next poll", async () => {
    const server = new FakeServer();
    server.set("GET", "/reservations/res-1", 200, { ...RESERVATION, state: "expired" });
    const { controller, renderer } = makeController(server);
    controller.state.navigation = "session";
    controller.state.reservation = { ...RESERVATION } as never;
    controller.state.promptTimes = ["2025-03-03T02:00:00Z"];
    await controller.refresh();
    expect(controller.state.reservation?.state).toBe("expired");
    expect(controller.state.promptTimes).toEqual([]);
    expect(renderer.last().screen).toBe("session"); // same screen, new state
    expect(renderer.last().reservationState).toBe("expired");
  });

  it("answering a prompt after session end discards it quietly", async () => {
    const server = new FakeServer();
    server.set("POST", "/feedback", 422, {
      error: "BadState",
      detail: "feedback requires an in-use session, not completed",
    });
    const { controller } = makeController(server);
    controller.state.reservation = { ...RESERVATION, state: "in_use" } as never;
    controller.state.promptTimes = ["2025-03-03T02:00:00Z"];
    await controller.answerPrompt({ thermal: "decrease" });
    expect(controller.pending()).toEqual([]); // prompt dropped, not retried
    expect(controller.state.error).toBeNull();
    expect(controller.state.answeredPrompts).toEqual([]);
  });
});
