// DOM layer: a direct translation of view state into markup. All decisions
// about what to show were already made in state.ts; this file only draws.

import type { AppController, Renderer } from "./controller.js";
import { bookingSlots, orderZones, type Screen, type ViewState } from "./state.js";
import type { Dimension, Vote } from "./types.js";

const DIMENSION_ROWS: { dim: Dimension; title: string; less: string; more: string }[] = [
  { dim: "thermal", title: "Temperature", less: "cooler", more: "warmer" },
  { dim: "visual", title: "Light", less: "dimmer", more: "brighter" },
  { dim: "aural", title: "Noise", less: "quieter", more: "louder" },
];

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(value: number | null | undefined, digits = 1): string {
  return value === null || value === undefined ? "-" : value.toFixed(digits);
}

export class DomRenderer implements Renderer {
  private controller!: AppController;

  constructor(private readonly root: HTMLElement) {}

  attach(controller: AppController): void {
    this.controller = controller;
  }

  render(state: ViewState, screen: Screen): void {
    this.root.replaceChildren();
    if (state.offline) {
      this.root.appendChild(el("div", "banner offline", "offline - retrying"));
    }
    if (state.error) {
      this.root.appendChild(el("div", "banner error", state.error));
    }
    const body = el("div", `screen screen-${screen}`);
    this.root.appendChild(body);
    switch (screen) {
      case "onboarding":
        this.renderOnboarding(body);
        break;
      case "zone-finder":
        this.renderZoneFinder(body, state);
        break;
      case "zone-dashboard":
        this.renderDashboard(body, state);
        break;
      case "booking":
        this.renderBooking(body, state);
        break;
      case "session":
        this.renderSession(body, state);
        break;
      case "feedback-prompt":
        this.renderPrompt(body, state);
        break;
      case "profile":
        this.renderProfile(body, state);
        break;
    }
  }

  private renderOnboarding(body: HTMLElement): void {
    body.appendChild(el("h1", undefined, "Find a desk that fits you"));
    body.appendChild(
      el("p", undefined, "Anonymous sign-in: one tap creates your private token."),
    );
    const button = el("button", "primary", "Get started") as HTMLButtonElement;
    button.addEventListener("click", () => void this.controller.onboard());
    body.appendChild(button);
  }

  private renderZoneFinder(body: HTMLElement, state: ViewState): void {
    body.appendChild(el("h1", undefined, "Flexible working zones"));
    const { cards, notice } = orderZones(state.zones, state.recommendations);
    if (notice) body.appendChild(el("div", "banner notice", notice));
    const list = el("div", "zone-list");
    for (const card of cards) {
      const item = el("div", "zone-card");
      item.appendChild(el("h2", undefined, `${card.zone.name}`));
      item.appendChild(
        el("p", "meta", `${card.zone.building}, floor ${card.zone.floor} - ${card.zone.desk_count} desks`),
      );
      if (card.matchBadge !== null) {
        item.appendChild(el("span", "badge", `match ${(card.matchBadge * 100).toFixed(0)}%`));
      }
      if (card.freeDesks !== null) {
        item.appendChild(el("span", "badge free", `${card.freeDesks} free`));
      }
      const open = el("button", undefined, "Details") as HTMLButtonElement;
      open.addEventListener("click", () => void this.controller.openZone(card.zone.zone_id));
      item.appendChild(open);
      list.appendChild(item);
    }
    body.appendChild(list);
    const profileButton = el("button", "link", "My comfort profile") as HTMLButtonElement;
    profileButton.addEventListener("click", () => void this.controller.showProfile());
    body.appendChild(profileButton);
  }

  private renderDashboard(body: HTMLElement, state: ViewState): void {
    const dash = state.dashboard;
    if (!dash) return;
    body.appendChild(el("h1", undefined, `Zone ${dash.zone_id}`));
    const tiles = el("div", "tiles");
    const latest = dash.latest_reading;
    const tileSpec: [string, string][] = [
      ["Temperature", `${fmt(latest?.temp_c)} °C`],
      ["Humidity", `${fmt(latest?.rh_pct, 0)} %`],
      ["Noise", `${fmt(latest?.noise_db, 0)} dB`],
      ["Light", `${fmt(latest?.lux, 0)} lux`],
      ["CO2", `${fmt(latest?.co2_ppm, 0)} ppm`],
      ["TVOC", `${fmt(latest?.tvoc_ppb, 0)} ppb`],
    ];
    for (const [label, value] of tileSpec) {
      const tile = el("div", "tile");
      tile.appendChild(el("span", "tile-label", label));
      tile.appendChild(el("span", "tile-value", value));
      tiles.appendChild(tile);
    }
    body.appendChild(tiles);

    const stats = el("table", "stats") as HTMLTableElement;
    const head = stats.insertRow();
    for (const text of ["channel", "n", "mean", "p10", "p50", "p90"]) {
      head.appendChild(el("th", undefined, text));
    }
    for (const [channel, s] of Object.entries(dash.stats)) {
      const row = stats.insertRow();
      row.insertCell().textContent = channel;
      row.insertCell().textContent = s ? String(s.n) : "0";
      row.insertCell().textContent = s ? fmt(s.mean) : "-";
      row.insertCell().textContent = s ? fmt(s.quantiles["p10"]) : "-";
      row.insertCell().textContent = s ? fmt(s.quantiles["p50"]) : "-";
      row.insertCell().textContent = s ? fmt(s.quantiles["p90"]) : "-";
    }
    body.appendChild(stats);

    const book = el("button", "primary", "Use or reserve a desk") as HTMLButtonElement;
    book.addEventListener("click", () => this.controller.openBooking());
    body.appendChild(book);
    const back = el("button", "link", "All zones") as HTMLButtonElement;
    back.addEventListener("click", () => this.controller.backToFinder());
    body.appendChild(back);
  }

  private renderBooking(body: HTMLElement, state: ViewState): void {
    body.appendChild(el("h1", undefined, "Start a session"));
    body.appendChild(el("h2", undefined, "Use a desk now"));
    body.appendChild(el("p", "meta", "Enter the 12-character code printed under the desk QR label."));
    const codeInput = el("input") as HTMLInputElement;
    codeInput.placeholder = "desk code";
    codeInput.maxLength = 12;
    const useNow = el("button", "primary", "Use now") as HTMLButtonElement;
    useNow.addEventListener("click", () => void this.controller.useNow(codeInput.value.trim()));
    body.append(codeInput, useNow);

    body.appendChild(el("h2", undefined, "Reserve for later"));
    const deskInput = el("input") as HTMLInputElement;
    deskInput.placeholder = "desk id (see zone details)";
    const slotSelect = el("select") as HTMLSelectElement;
    for (const slot of bookingSlots(this.controller.nowIso())) {
      const option = el("option", undefined, new Date(slot).toLocaleString()) as HTMLOptionElement;
      option.value = slot;
      slotSelect.appendChild(option);
    }
    const reserve = el("button", undefined, "Reserve") as HTMLButtonElement;
    reserve.addEventListener("click", () =>
      void this.controller.reserveDesk(deskInput.value.trim(), slotSelect.value),
    );
    body.append(deskInput, slotSelect, reserve);
  }

  private renderSession(body: HTMLElement, state: ViewState): void {
    const reservation = state.reservation;
    if (!reservation) {
      this.renderBooking(body, state);
      return;
    }
    body.appendChild(el("h1", undefined, `Desk ${reservation.desk_id}`));
    body.appendChild(el("p", "meta", `state: ${reservation.state}`));
    body.appendChild(
      el(
        "p",
        undefined,
        `${new Date(reservation.start).toLocaleTimeString()} to ${new Date(reservation.end).toLocaleTimeString()}`,
      ),
    );
    if (reservation.state === "reserved") {
      const codeInput = el("input") as HTMLInputElement;
      codeInput.placeholder = "scan or type the desk code";
      const checkIn = el("button", "primary", "Check in") as HTMLButtonElement;
      checkIn.addEventListener("click", () => void this.controller.checkIn(codeInput.value.trim()));
      const cancel = el("button", "link", "Cancel reservation") as HTMLButtonElement;
      cancel.addEventListener("click", () => void this.controller.cancelReservation());
      body.append(codeInput, checkIn, cancel);
    }
    if (reservation.state === "in_use") {
      const extend = el("button", undefined, "Extend 2 hours") as HTMLButtonElement;
      extend.addEventListener("click", () => void this.controller.extendSession());
      body.appendChild(extend);
    }
    if (reservation.state === "expired" || reservation.state === "completed") {
      body.appendChild(el("p", "banner notice", `session ${reservation.state}`));
      const back = el("button", "link", "Find a zone") as HTMLButtonElement;
      back.addEventListener("click", () => this.controller.backToFinder());
      body.appendChild(back);
    }
  }

  private renderPrompt(body: HTMLElement, state: ViewState): void {
    body.appendChild(el("h1", undefined, "How is this desk right now?"));
    const chosen: Partial<Record<string, Vote>> = {};
    for (const row of DIMENSION_ROWS) {
      const group = el("div", "prompt-row");
      group.appendChild(el("span", "prompt-title", row.title));
      const options: [Vote, string][] = [
        ["decrease", `prefer ${row.less}`],
        ["comfortable", "comfortable"],
        ["increase", `prefer ${row.more}`],
      ];
      for (const [vote, text] of options) {
        const button = el("button", "vote", text) as HTMLButtonElement;
        button.addEventListener("click", () => {
          chosen[row.dim] = vote;
          for (const sibling of Array.from(group.querySelectorAll("button"))) {
            sibling.classList.remove("selected");
          }
          button.classList.add("selected");
        });
        group.appendChild(button);
      }
      body.appendChild(group);
    }
    const submit = el("button", "primary", "Send feedback") as HTMLButtonElement;
    submit.addEventListener("click", () => void this.controller.answerPrompt(chosen));
    const dismiss = el("button", "link", "Not now") as HTMLButtonElement;
    dismiss.addEventListener("click", () => this.controller.dismissPrompt());
    body.append(submit, dismiss);
  }

  private renderProfile(body: HTMLElement, state: ViewState): void {
    body.appendChild(el("h1", undefined, "Your comfort profile"));
    const profile = state.profile;
    if (profile) {
      const table = el("table", "stats") as HTMLTableElement;
      for (const [dim, entry] of Object.entries(profile.dimensions)) {
        const row = table.insertRow();
        row.insertCell().textContent = dim;
        row.insertCell().textContent = entry.text;
        row.insertCell().textContent = `${entry.n_votes} votes`;
      }
      body.appendChild(table);
    }
    const back = el("button", "link", "All zones") as HTMLButtonElement;
    back.addEventListener("click", () => this.controller.backToFinder());
    body.appendChild(back);
  }
}
