#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes the synthetic LCD excerpts under data/lcd/.

The files follow the NOAA Local Climatological Data CSV layout (fully quoted
fields, FM-15 routine and FM-16 special reports, SOD daily summary rows,
quality suffixes, VRB wind direction) but the weather itself is generated.

    python3 tools/make_lcd_fixtures.py [output_dir]
"""

import csv
import datetime as dt
import math
import pathlib
import random
import sys

HEADER = [
    "STATION", "DATE", "LATITUDE", "LONGITUDE", "ELEVATION", "NAME", "REPORT_TYPE", "SOURCE",
    "HourlyAltimeterSetting", "HourlyDewPointTemperature", "HourlyDryBulbTemperature",
    "HourlyPrecipitation", "HourlyPresentWeatherType", "HourlyPressureChange",
    "HourlyPressureTendency", "HourlyRelativeHumidity", "HourlySkyConditions",
    "HourlySeaLevelPressure", "HourlyStationPressure", "HourlyVisibility",
    "HourlyWetBulbTemperature", "HourlyWindDirection", "HourlyWindGustSpeed", "HourlyWindSpeed",
    "DailyAverageWindSpeed", "DailyMaximumSustainedWindSpeed", "Sunrise", "Sunset",
]

SITES = [
    {
        "file": "starkville_2022-07.csv",
        "station": "72000000001",
        "name": "STARKVILLE GEORGE M BRYAN AIRPORT, MS US",
        "lat": "33.4320", "lon": "-88.7490", "elev": "101.5",
        "minute": 56, "seed": 7, "wind_mean": 6.5, "temp_mean": 81.0,
    },
    {
        "file": "meridian_2022-07.csv",
        "station": "72000000002",
        "name": "MERIDIAN KEY FIELD, MS US",
        "lat": "32.3347", "lon": "-88.7442", "elev": "94.2",
        "minute": 53, "seed": 11, "wind_mean": 5.0, "temp_mean": 82.0,
    },
]

START = dt.datetime(2022, 7, 1)
DAYS = 8


def dew_rh_wetbulb(temp_f, dew_f):
    tc = (temp_f - 32) / 1.8
    dc = (dew_f - 32) / 1.8
    es = 6.112 * math.exp(17.67 * tc / (tc + 243.5))
    e = 6.112 * math.exp(17.67 * dc / (dc + 243.5))
    rh = max(1, min(100, round(100 * e / es)))
    wet = temp_f - (temp_f - dew_f) / 3.0
    return rh, round(wet)


def hour_rows(site, rng, state, when):
    h = when.hour
    diurnal = math.sin(2 * math.pi * (h - 9) / 24)
    temp = site["temp_mean"] + 9 * diurnal + rng.gauss(0, 1.0)
    dew = min(temp - 1, 72 + 2 * math.sin(2 * math.pi * when.day / 5) + rng.gauss(0, 0.8))
    state["wind"] = 0.8 * state["wind"] + 0.2 * (site["wind_mean"] * (1 + 0.5 * diurnal)) \
        + rng.gauss(0, 1.2)
    speed = max(0, round(state["wind"]))
    state["dir"] = (state["dir"] + rng.gauss(0, 25)) % 360
    direction = "000" if speed == 0 else f"{int(round(state['dir'] / 10) * 10) % 360 or 360:03d}"
    if 0 < speed <= 3 and rng.random() < 0.3:
        direction = "VRB"
    state["press"] += rng.gauss(0, 0.01) - 0.05 * (state["press"] - 29.95)
    station_p = state["press"] - 0.35
    vis = 10.0 if rng.random() < 0.85 else rng.choice([2.5, 5.0, 7.0, 9.0])
    rh, wet = dew_rh_wetbulb(temp, dew)
    gust = str(speed + rng.randint(6, 12)) if speed >= 9 and rng.random() < 0.5 else ""
    return {
        "HourlyAltimeterSetting": f"{state['press'] + 0.01:.2f}",
        "HourlyDewPointTemperature": str(round(dew)),
        "HourlyDryBulbTemperature": str(round(temp)),
        "HourlyPrecipitation": "0.00" if vis == 10.0 else "T",
        "HourlyPresentWeatherType": "" if vis == 10.0 else "BR:1 ||",
        "HourlyPressureChange": "",
        "HourlyPressureTendency": "",
        "HourlyRelativeHumidity": str(rh),
        "HourlySkyConditions": "CLR:00" if vis == 10.0 else "SCT:04 35",
        "HourlySeaLevelPressure": f"{state['press']:.2f}",
        "HourlyStationPressure": f"{station_p:.2f}",
        "HourlyVisibility": f"{vis:.2f}",
        "HourlyWetBulbTemperature": str(wet),
        "HourlyWindDirection": direction,
        "HourlyWindGustSpeed": gust,
        "HourlyWindSpeed": str(speed),
    }


def build(site):
    rng = random.Random(site["seed"])
    state = {"wind": site["wind_mean"], "dir": 180.0, "press": 29.95}
    base = {
        "STATION": site["station"], "LATITUDE": site["lat"], "LONGITUDE": site["lon"],
        "ELEVATION": site["elev"], "NAME": site["name"],
    }
    rows = []
    daily_speeds = []
    for hour_index in range(DAYS * 24):
        top = START + dt.timedelta(hours=hour_index)
        values = hour_rows(site, rng, state, top)
        daily_speeds.append(int(values["HourlyWindSpeed"]))
        stamp = top.replace(minute=site["minute"])
        row = dict(base, DATE=stamp.strftime("%Y-%m-%dT%H:%M:%S"), REPORT_TYPE="FM-15",
                   SOURCE="7", **values)
        # Quality-flagged values carry a trailing "s"; a few are flagged "*" (missing).
        if rng.random() < 0.04:
            row["HourlyDryBulbTemperature"] += "s"
        if rng.random() < 0.03:
            row["HourlyDewPointTemperature"] += "s"
        if hour_index % 41 == 17:
            row["HourlyWetBulbTemperature"] = "*"
        if hour_index % 53 == 29:
            row["HourlyStationPressure"] = ""
        rows.append(row)
        # Special reports later in the same hour; clean() keeps the routine one.
        if hour_index % 19 == 5:
            special = dict(row, DATE=(top + dt.timedelta(minutes=site["minute"] + 3))
                           .strftime("%Y-%m-%dT%H:%M:%S"), REPORT_TYPE="FM-16")
            special["HourlyWindSpeed"] = str(int(values["HourlyWindSpeed"]) + 2)
            special["HourlyVisibility"] = "4.00"
            rows.append(special)
        if top.hour == 23:
            mean = sum(daily_speeds) / len(daily_speeds)
            summary = {k: "" for k in HEADER}
            summary.update(base)
            summary.update(DATE=top.replace(minute=59).strftime("%Y-%m-%dT%H:%M:%S"),
                           REPORT_TYPE="SOD  ", SOURCE="6",
                           DailyAverageWindSpeed=f"{mean:.1f}",
                           DailyMaximumSustainedWindSpeed=str(max(daily_speeds)),
                           Sunrise="0502", Sunset="1908")
            rows.append(summary)
            daily_speeds = []
    # One routine report lost in transmission: clean() reinserts the hour.
    del rows[len(rows) // 2]
    return rows


def main():
    out_dir = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else \
        pathlib.Path(__file__).resolve().parent.parent / "data" / "lcd"
    out_dir.mkdir(parents=True, exist_ok=True)
    for site in SITES:
        rows = build(site)
        with open(out_dir / site["file"], "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=HEADER, quoting=csv.QUOTE_ALL,
                                    restval="", lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: row.get(k, "") for k in HEADER})
        print(f"wrote {out_dir / site['file']} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
