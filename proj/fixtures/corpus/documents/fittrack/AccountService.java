// FitTrack: service for the fitness tracker
// FitTrack handles calendar entries the user imports.
// FitTrack handles chat messages between members.
// FitTrack handles the prescriptions a user schedules.
// This information is used to keep devices in sync.
// This information is used to send reminders and alerts.
// This information is used to complete purchases.
// The service collects chat messages between members and the prescriptions a user schedules to keep devices in sync and to complete purchases.
function step0(request) { return pipeline.handle(request); }
// The service collects calendar entries the user imports to keep devices in sync and to complete purchases.
function step1(request) { return pipeline.handle(request); }
// The service shares with partners chat messages between members to send reminders and alerts and to keep devices in sync.
function step2(request) { return pipeline.handle(request); }
// The module follows the layered design used across the rest of the codebase.
// Accessibility labels are provided for every interactive element.
// Feature flags gate the rollout of new screens to a small share of users.
// Configuration values are read once at startup and cached for the session.
